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

#include "polyloop/numcore/checkpoint.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace polyloop::num {
namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

template <typename U>
U ToLittle(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(U)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<U>(bytes);
  } else {
    return v;
  }
}

template <typename U>
void Put(std::ofstream& out, U v) {
  v = ToLittle(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(U));
}

void PutString(std::ofstream& out, const std::string& s) {
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open checkpoint " + path);
  }

  template <typename U>
  U Get() {
    U v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(U));
    if (!in_) throw IoError(path_ + ": truncated checkpoint");
    return ToLittle(v);
  }

  std::string GetString(std::size_t limit) {
    const auto n = Get<std::uint32_t>();
    if (n > limit) throw IoError(path_ + ": string field too long");
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (!in_) throw IoError(path_ + ": truncated checkpoint");
    return s;
  }

  void Bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (!in_) throw IoError(path_ + ": truncated checkpoint");
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

using Bits32 = std::uint32_t;
using Bits64 = std::uint64_t;
template <typename T>
using BitsOf = std::conditional_t<sizeof(T) == 4, Bits32, Bits64>;

}  // namespace

template <typename T>
void SaveCheckpoint(const std::string& path, const ParameterStore<T>& params,
                    const std::string& metadata) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  Put<std::uint32_t>(out, kCheckpointVersion);
  Put<std::uint32_t>(out, sizeof(T));
  PutString(out, metadata);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter<T>& p = params.at(i);
    PutString(out, p.name);
    Put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) Put<std::uint64_t>(out, d);
    for (T v : p.value.values()) Put<BitsOf<T>>(out, std::bit_cast<BitsOf<T>>(v));
  }
  if (!out) throw IoError("failed writing checkpoint " + path);
}

template <typename T>
Checkpoint<T> LoadCheckpoint(const std::string& path) {
  Reader in(path);
  char magic[sizeof(kCheckpointMagic)];
  in.Bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw IoError(path + ": not a checkpoint (bad magic)");
  }
  const auto version = in.Get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw IoError(path + ": unsupported checkpoint version " +
                  std::to_string(version));
  }
  const auto width = in.Get<std::uint32_t>();
  if (width != sizeof(T)) {
    throw IoError(path + ": checkpoint stores " + std::to_string(width * 8) +
                  "-bit values, expected " + std::to_string(sizeof(T) * 8));
  }
  Checkpoint<T> ckpt;
  ckpt.metadata = in.GetString(1u << 24);
  const auto count = in.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = in.GetString(4096);
    const auto rank = in.Get<std::uint32_t>();
    if (rank == 0 || rank > 8) throw IoError(path + ": bad rank for " + name);
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(in.Get<std::uint64_t>());
    const std::size_t n = ShapeProduct(shape);
    if (n == 0 || n > (std::size_t{1} << 32)) {
      throw IoError(path + ": bad shape for " + name);
    }
    std::vector<T> data(n);
    for (T& v : data) v = std::bit_cast<T>(in.Get<BitsOf<T>>());
    ckpt.params.Add(name, Tensor<T>(std::move(shape), std::move(data)));
  }
  return ckpt;
}

template <typename T>
std::string LoadCheckpointInto(const std::string& path,
                               ParameterStore<T>& params) {
  Checkpoint<T> ckpt = LoadCheckpoint<T>(path);
  if (ckpt.params.size() != params.size()) {
    throw IoError(path + ": checkpoint has " +
                  std::to_string(ckpt.params.size()) +
                  " parameters, model has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter<T>& dst = params.at(i);
    if (!ckpt.params.Contains(dst.name)) {
      throw IoError(path + ": missing parameter " + dst.name);
    }
    const Parameter<T>& src = ckpt.params.Get(dst.name);
    if (src.value.shape() != dst.value.shape()) {
      throw IoError(path + ": parameter " + dst.name + " has shape " +
                    ShapeToString(src.value.shape()) + ", model expects " +
                    ShapeToString(dst.value.shape()));
    }
    dst.value = src.value;
  }
  return ckpt.metadata;
}

template void SaveCheckpoint(const std::string&, const ParameterStore<float>&,
                             const std::string&);
template void SaveCheckpoint(const std::string&, const ParameterStore<double>&,
                             const std::string&);
template Checkpoint<float> LoadCheckpoint(const std::string&);
template Checkpoint<double> LoadCheckpoint(const std::string&);
template std::string LoadCheckpointInto(const std::string&,
                                        ParameterStore<float>&);
template std::string LoadCheckpointInto(const std::string&,
                                        ParameterStore<double>&);

}  // namespace polyloop::num
