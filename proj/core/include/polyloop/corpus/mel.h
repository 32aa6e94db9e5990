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

#ifndef POLYLOOP_CORPUS_MEL_H_
#define POLYLOOP_CORPUS_MEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polyloop/common/error.h"

namespace polyloop::corpus {

inline constexpr std::size_t kDefaultMelBins = 80;

// [frames x bins] log-amplitude mel spectrogram, row-major, unnormalized.
// Zero frames is allowed (an empty synthesis result).
class MelSpectrogram {
 public:
  MelSpectrogram() = default;
  MelSpectrogram(std::size_t frames, std::size_t bins, float fill = 0.0f)
      : frames_(frames), bins_(bins), data_(frames * bins, fill) {}
  MelSpectrogram(std::size_t frames, std::size_t bins, std::vector<float> data);

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  bool empty() const { return frames_ == 0; }

  float& at(std::size_t frame, std::size_t bin) {
    return data_[frame * bins_ + bin];
  }
  float at(std::size_t frame, std::size_t bin) const {
    return data_[frame * bins_ + bin];
  }
  std::span<const float> frame(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * bins_, bins_);
  }
  std::span<const float> values() const { return data_; }
  std::span<float> values() { return data_; }

  // Frames [begin, end).
  MelSpectrogram Slice(std::size_t begin, std::size_t end) const;
  void Append(const MelSpectrogram& other);

  float Min() const;
  float Max() const;

  bool operator==(const MelSpectrogram&) const = default;

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<float> data_;
};

// Mel file: "PLML" magic, then u32 version (1), u32 frames, u32 bins, then
// frames*bins little-endian float32 values, row-major.
inline constexpr std::uint32_t kMelFileVersion = 1;

void WriteMelFile(const std::string& path, const MelSpectrogram& mel);
MelSpectrogram ReadMelFile(const std::string& path);

}  // namespace polyloop::corpus

#endif  // POLYLOOP_CORPUS_MEL_H_
