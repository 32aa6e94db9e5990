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

#include "polyloop/corpus/phoneset.h"

#include <fstream>

namespace polyloop::corpus {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Phoneset::Phoneset(std::string language, std::vector<std::string> symbols)
    : language_(std::move(language)), symbols_(std::move(symbols)) {
  if (language_.empty()) throw ValidationError("phoneset without language");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) {
      throw ValidationError("empty phoneme symbol in " + language_);
    }
    if (!index_.emplace(symbols_[i], static_cast<int>(i)).second) {
      throw ValidationError("duplicate phoneme '" + symbols_[i] + "' in " +
                            language_);
    }
  }
}

Phoneset Phoneset::Load(const std::string& language, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open phoneset " + path);
  std::vector<std::string> symbols;
  std::string line;
  while (std::getline(in, line)) {
    std::string s = Trim(line);
    if (!s.empty()) symbols.push_back(std::move(s));
  }
  return Phoneset(language, std::move(symbols));
}

void Phoneset::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write phoneset " + path);
  for (const auto& s : symbols_) out << s << '\n';
}

std::optional<int> Phoneset::Find(const std::string& symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Phoneset::Symbol(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= symbols_.size()) {
    throw ValidationError("phoneme index " + std::to_string(index) +
                          " out of range for " + language_);
  }
  return symbols_[static_cast<std::size_t>(index)];
}

std::vector<int> Phoneset::Encode(std::span<const std::string> symbols) const {
  std::vector<int> out;
  out.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    auto idx = Find(symbols[i]);
    if (!idx) throw UnknownSymbolError(language_, symbols[i], i);
    out.push_back(*idx);
  }
  return out;
}

std::vector<std::string> Phoneset::Decode(std::span<const int> indices) const {
  std::vector<std::string> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(Symbol(i));
  return out;
}

}  // namespace polyloop::corpus
