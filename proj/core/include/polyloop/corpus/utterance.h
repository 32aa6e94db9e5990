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

#ifndef POLYLOOP_CORPUS_UTTERANCE_H_
#define POLYLOOP_CORPUS_UTTERANCE_H_

#include <memory>
#include <string>
#include <vector>

#include "polyloop/corpus/mel.h"

namespace polyloop::corpus {

struct Utterance {
  std::string id;
  std::string speaker;
  std::string language;
  std::vector<int> phonemes;
  MelSpectrogram mel;

  std::size_t frames() const { return mel.frames(); }
};

using UtterancePtr = std::shared_ptr<const Utterance>;

// A training sample: frames [start, start + mel.frames()) of `source`.
// Parts keep the full phoneme sequence of their source; the decoder state
// for a part is obtained by running the teacher-forced decoder over the
// source frames preceding `start`.
struct UtterancePart {
  UtterancePtr source;
  std::size_t start = 0;
  MelSpectrogram mel;

  std::size_t frames() const { return mel.frames(); }
  std::size_t end() const { return start + mel.frames(); }
  // True when the part contains the last frame of its source.
  bool final() const { return source && end() == source->frames(); }
};

// Whole utterance as a single part.
UtterancePart WholeUtterance(UtterancePtr u);

inline constexpr std::size_t kPretrainMaxSentenceFrames = 800;
inline constexpr std::size_t kPretrainMaxPartFrames = 200;

// Utterances longer than `max_sentence` frames yield no parts. Others are
// split greedily from the left into parts of `max_part` frames, the last
// part holding the remainder. Throws if max_part is 0 or exceeds
// max_sentence.
std::vector<UtterancePart> ChunkForPretraining(
    const UtterancePtr& utterance,
    std::size_t max_sentence = kPretrainMaxSentenceFrames,
    std::size_t max_part = kPretrainMaxPartFrames);

std::vector<UtterancePart> ChunkAll(
    const std::vector<UtterancePtr>& utterances,
    std::size_t max_sentence = kPretrainMaxSentenceFrames,
    std::size_t max_part = kPretrainMaxPartFrames);

}  // namespace polyloop::corpus

#endif  // POLYLOOP_CORPUS_UTTERANCE_H_
