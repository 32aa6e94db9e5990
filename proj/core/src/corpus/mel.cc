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

#include "polyloop/corpus/mel.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace polyloop::corpus {
namespace {

constexpr char kMagic[4] = {'P', 'L', 'M', 'L'};

std::uint32_t ByteSwap(std::uint32_t v) {
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
         (v >> 24);
}

std::uint32_t ToLittle(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) return ByteSwap(v);
  return v;
}

void PutU32(std::ofstream& out, std::uint32_t v) {
  v = ToLittle(v);
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t GetU32(std::ifstream& in, const std::string& path) {
  std::uint32_t v;
  in.read(reinterpret_cast<char*>(&v), 4);
  if (!in) throw IoError(path + ": truncated mel file");
  return ToLittle(v);
}

}  // namespace

MelSpectrogram::MelSpectrogram(std::size_t frames, std::size_t bins,
                               std::vector<float> data)
    : frames_(frames), bins_(bins), data_(std::move(data)) {
  if (data_.size() != frames_ * bins_) {
    throw ValidationError("mel data size " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(frames_) + "x" +
                          std::to_string(bins_));
  }
}

MelSpectrogram MelSpectrogram::Slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > frames_) {
    throw ValidationError("mel slice out of range");
  }
  std::vector<float> out(data_.begin() + static_cast<std::ptrdiff_t>(begin * bins_),
                         data_.begin() + static_cast<std::ptrdiff_t>(end * bins_));
  return MelSpectrogram(end - begin, bins_, std::move(out));
}

void MelSpectrogram::Append(const MelSpectrogram& other) {
  if (frames_ == 0 && bins_ == 0) bins_ = other.bins_;
  if (other.frames_ > 0 && other.bins_ != bins_) {
    throw ValidationError("cannot append mel with " +
                          std::to_string(other.bins_) + " bins to one with " +
                          std::to_string(bins_));
  }
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  frames_ += other.frames_;
}

float MelSpectrogram::Min() const {
  float m = std::numeric_limits<float>::infinity();
  for (float v : data_) m = std::min(m, v);
  return m;
}

float MelSpectrogram::Max() const {
  float m = -std::numeric_limits<float>::infinity();
  for (float v : data_) m = std::max(m, v);
  return m;
}

void WriteMelFile(const std::string& path, const MelSpectrogram& mel) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write mel file " + path);
  out.write(kMagic, 4);
  PutU32(out, kMelFileVersion);
  PutU32(out, static_cast<std::uint32_t>(mel.frames()));
  PutU32(out, static_cast<std::uint32_t>(mel.bins()));
  for (float v : mel.values()) PutU32(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw IoError("failed writing mel file " + path);
}

MelSpectrogram ReadMelFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mel file " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError(path + ": not a mel file (bad magic)");
  }
  const std::uint32_t version = GetU32(in, path);
  if (version != kMelFileVersion) {
    throw IoError(path + ": unsupported mel file version " +
                  std::to_string(version));
  }
  const std::uint32_t frames = GetU32(in, path);
  const std::uint32_t bins = GetU32(in, path);
  if (bins == 0 || static_cast<std::uint64_t>(frames) * bins > (1ull << 31)) {
    throw IoError(path + ": implausible mel dimensions");
  }
  std::vector<float> data(static_cast<std::size_t>(frames) * bins);
  for (float& v : data) v = std::bit_cast<float>(GetU32(in, path));
  return MelSpectrogram(frames, bins, std::move(data));
}

}  // namespace polyloop::corpus
