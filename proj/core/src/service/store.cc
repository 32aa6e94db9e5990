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

#include "polyloop/service/store.h"

#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "polyloop/common/error.h"

namespace polyloop::service {

RatingStore::RatingStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path_.parent_path().string() + ": " + ec.message());
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) {
    throw IoError("cannot open store " + path_.string() + ": " + std::strerror(errno));
  }
}

RatingStore::~RatingStore() {
  if (file_) std::fclose(file_);
}

std::vector<std::string> RatingStore::ReadAll() const {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw IoError("cannot read store " + path_.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    const std::size_t end = content.find('\n', start);
    if (end == std::string::npos) {
      throw ParseError(path_.string(), static_cast<int>(lines.size() + 1),
                       "truncated record");
    }
    if (end > start) lines.push_back(content.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

void RatingStore::Append(const std::string& line) {
  if (line.find('\n') != std::string::npos) {
    throw ValidationError("store records must be single lines");
  }
  const std::string data = line + "\n";
  if (std::fwrite(data.data(), 1, data.size(), file_) != data.size() ||
      std::fflush(file_) != 0 || ::fsync(fileno(file_)) != 0) {
    throw IoError("write to " + path_.string() + " failed: " + std::strerror(errno));
  }
}

}  // namespace polyloop::service
