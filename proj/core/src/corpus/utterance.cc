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

#include "polyloop/corpus/utterance.h"

#include <algorithm>

namespace polyloop::corpus {

UtterancePart WholeUtterance(UtterancePtr u) {
  UtterancePart part;
  part.mel = u->mel;
  part.source = std::move(u);
  return part;
}

std::vector<UtterancePart> ChunkForPretraining(const UtterancePtr& utterance,
                                               std::size_t max_sentence,
                                               std::size_t max_part) {
  if (max_part == 0 || max_part > max_sentence) {
    throw ValidationError("chunking requires 0 < max_part <= max_sentence");
  }
  std::vector<UtterancePart> parts;
  const std::size_t frames = utterance->frames();
  if (frames == 0 || frames > max_sentence) return parts;
  for (std::size_t start = 0; start < frames; start += max_part) {
    const std::size_t end = std::min(frames, start + max_part);
    parts.push_back({utterance, start, utterance->mel.Slice(start, end)});
  }
  return parts;
}

std::vector<UtterancePart> ChunkAll(const std::vector<UtterancePtr>& utterances,
                                    std::size_t max_sentence,
                                    std::size_t max_part) {
  std::vector<UtterancePart> out;
  for (const auto& u : utterances) {
    auto parts = ChunkForPretraining(u, max_sentence, max_part);
    out.insert(out.end(), std::make_move_iterator(parts.begin()),
               std::make_move_iterator(parts.end()));
  }
  return out;
}

}  // namespace polyloop::corpus
