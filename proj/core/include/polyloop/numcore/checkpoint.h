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

#ifndef POLYLOOP_NUMCORE_CHECKPOINT_H_
#define POLYLOOP_NUMCORE_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "polyloop/numcore/parameters.h"

namespace polyloop::num {

// Binary parameter checkpoint, all integers little-endian:
//
//   "PLYLOOPC"                    8-byte magic
//   u32 version                   currently 1
//   u32 scalar_bytes              4 (float) or 8 (double)
//   u32 metadata_len, bytes       free-form text (model config JSON)
//   u32 count
//   count x { u32 name_len, name, u32 rank, u64 dims[rank],
//             raw little-endian values }
//
// Values are written bit-for-bit, so save/load round-trips exactly.
inline constexpr char kCheckpointMagic[8] = {'P', 'L', 'Y', 'L',
                                             'O', 'O', 'P', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
struct Checkpoint {
  std::string metadata;
  ParameterStore<T> params;
};

template <typename T>
void SaveCheckpoint(const std::string& path, const ParameterStore<T>& params,
                    const std::string& metadata = "");

// Throws IoError on malformed files or a scalar width that differs from T.
template <typename T>
Checkpoint<T> LoadCheckpoint(const std::string& path);

// Overwrites values of an existing store; every name and shape must match.
template <typename T>
std::string LoadCheckpointInto(const std::string& path,
                               ParameterStore<T>& params);

}  // namespace polyloop::num

#endif  // POLYLOOP_NUMCORE_CHECKPOINT_H_
