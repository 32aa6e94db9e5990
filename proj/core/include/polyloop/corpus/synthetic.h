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

#ifndef POLYLOOP_CORPUS_SYNTHETIC_H_
#define POLYLOOP_CORPUS_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "polyloop/corpus/manifest.h"

namespace polyloop::corpus {

// Stand-in corpus for experiments without recorded speech. Every phoneme
// of a language has a fixed spectral envelope and duration, and every
// speaker a fixed level offset and spectral tilt, so mel frames are a
// deterministic function of (speaker, phoneme sequence).
struct SyntheticLanguage {
  std::string code;
  std::size_t phonemes = 12;
};

struct SyntheticSpeaker {
  std::string id;
  std::string language;
  std::size_t utterances = 10;
};

struct SyntheticCorpusConfig {
  std::vector<SyntheticLanguage> languages;
  std::vector<SyntheticSpeaker> speakers;
  std::size_t mel_bins = kDefaultMelBins;
  std::size_t min_phonemes = 4;
  std::size_t max_phonemes = 8;
  std::size_t min_duration = 2;  // frames per phoneme
  std::size_t max_duration = 5;
  std::uint64_t seed = 1;
};

Corpus GenerateSyntheticCorpus(const SyntheticCorpusConfig& config);

// Writes phonesets, phoneme files, mel files and `manifest.tsv` under
// `dir`; returns the manifest as written.
CorpusManifest WriteCorpus(const Corpus& corpus,
                           const std::filesystem::path& dir);

}  // namespace polyloop::corpus

#endif  // POLYLOOP_CORPUS_SYNTHETIC_H_
