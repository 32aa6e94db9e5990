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

#ifndef POLYLOOP_CORPUS_PHONESET_H_
#define POLYLOOP_CORPUS_PHONESET_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyloop/common/error.h"

namespace polyloop::corpus {

class UnknownSymbolError : public ValidationError {
 public:
  UnknownSymbolError(const std::string& language, const std::string& symbol,
                     std::size_t position)
      : ValidationError("unknown phoneme '" + symbol + "' at position " +
                        std::to_string(position) + " for language " +
                        language),
        symbol_(symbol),
        position_(position) {}
  const std::string& symbol() const { return symbol_; }
  std::size_t position() const { return position_; }

 private:
  std::string symbol_;
  std::size_t position_;
};

// Phoneme inventory of one language. Symbol i maps to integer i.
class Phoneset {
 public:
  Phoneset(std::string language, std::vector<std::string> symbols);

  // One symbol per line; surrounding whitespace and empty lines ignored.
  static Phoneset Load(const std::string& language, const std::string& path);
  void Save(const std::string& path) const;

  const std::string& language() const { return language_; }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  std::optional<int> Find(const std::string& symbol) const;
  const std::string& Symbol(int index) const;

  std::vector<int> Encode(std::span<const std::string> symbols) const;
  std::vector<std::string> Decode(std::span<const int> indices) const;

 private:
  std::string language_;
  std::vector<std::string> symbols_;
  std::map<std::string, int> index_;
};

}  // namespace polyloop::corpus

#endif  // POLYLOOP_CORPUS_PHONESET_H_
