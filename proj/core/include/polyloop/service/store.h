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

#ifndef POLYLOOP_SERVICE_STORE_H_
#define POLYLOOP_SERVICE_STORE_H_

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace polyloop::service {

// Append-only line store. Each Append is flushed and synced before it
// returns, so a caller may release dependent state afterwards. Not
// thread-safe; the service serializes writes.
class RatingStore {
 public:
  explicit RatingStore(std::filesystem::path path);
  ~RatingStore();
  RatingStore(const RatingStore&) = delete;
  RatingStore& operator=(const RatingStore&) = delete;

  const std::filesystem::path& path() const { return path_; }

  // Every complete line currently in the file. A final line without a
  // newline (torn write) is reported as a ParseError.
  std::vector<std::string> ReadAll() const;
  void Append(const std::string& line);

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
};

}  // namespace polyloop::service

#endif  // POLYLOOP_SERVICE_STORE_H_
