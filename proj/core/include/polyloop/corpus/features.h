// Copyright 2026 The polyloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POLYLOOP_CORPUS_FEATURES_H_
#define POLYLOOP_CORPUS_FEATURES_H_

#include <span>
#include <string>
#include <vector>

#include "polyloop/corpus/mel.h"

namespace polyloop::corpus {

// Log-mel analysis used for user-supplied audio. Frames are centred
// (reflect padding of n_fft / 2), windowed with a periodic Hann window,
// and the STFT magnitude is projected onto a Slaney-normalized mel
// filterbank. Output is ln(max(mel, log_floor)); no further normalization.
struct MelFeatureConfig {
  int sample_rate = 22050;
  std::size_t n_fft = 1024;
  std::size_t hop = 256;
  std::size_t mel_bins = kDefaultMelBins;
  double fmin = 0.0;
  double fmax = 11025.0;
  double log_floor = 1e-5;
};

// [mel_bins x (n_fft / 2 + 1)] filterbank, row-major.
std::vector<double> SlaneyMelFilterbank(const MelFeatureConfig& config);

MelSpectrogram ComputeLogMel(std::span<const float> samples,
                             const MelFeatureConfig& config = {});

struct WavAudio {
  int sample_rate = 0;
  std::vector<float> samples;  // mono, [-1, 1]
};

// 16-bit PCM or 32-bit float RIFF/WAVE; channels are averaged to mono.
WavAudio ReadWav(const std::string& path);
void WriteWav(const std::string& path, const WavAudio& audio);

}  // namespace polyloop::corpus

#endif  // POLYLOOP_CORPUS_FEATURES_H_
