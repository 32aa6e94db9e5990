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

#ifndef POLYLOOP_STRATEGIES_STRATEGY_H_
#define POLYLOOP_STRATEGIES_STRATEGY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "polyloop/common/error.h"
#include "polyloop/corpus/manifest.h"

namespace polyloop::strategies {

struct StrategyEntry {
  std::string speaker;
  std::string language;
  std::size_t count = 0;  // sentences

  bool operator==(const StrategyEntry&) const = default;
};

// A data-combination recipe: sentences from one target speaker plus
// optional auxiliary speakers.
struct StrategySpec {
  std::string name;
  StrategyEntry target;
  std::vector<StrategyEntry> auxiliaries;

  // Throws ValidationError: empty name or target, repeated speaker.
  void Validate() const;

  std::size_t AuxiliaryCount() const;  // summed sentences
  std::vector<std::string> AuxiliaryLanguages() const;  // distinct, sorted

  std::string ToJson() const;
  bool operator==(const StrategySpec&) const = default;
};

// Target language and speaker used by the built-in specs. Pools with other
// ids are mapped through a Binding.
inline constexpr char kTargetSpeaker[] = "target";
inline constexpr char kTargetLanguage[] = "en-US";

// The ten recipes of the two experiments, in a fixed order.
const std::vector<StrategySpec>& BuiltinSpecs();
// Throws ValidationError for unknown names.
const StrategySpec& FindBuiltin(const std::string& name);

// Custom specs from JSON: a single object or an array of objects.
std::vector<StrategySpec> ParseSpecs(const std::string& json);
std::vector<StrategySpec> LoadSpecs(const std::filesystem::path& path);

// Renames spec speakers and languages to the ids used in a pool. Ids
// absent from the maps are used unchanged.
struct Binding {
  std::map<std::string, std::string> speakers;
  std::map<std::string, std::string> languages;
};

struct Shortfall {
  std::string speaker;
  std::string language;
  std::size_t requested = 0;
  std::size_t available = 0;
};

class InsufficientDataError : public ValidationError {
 public:
  explicit InsufficientDataError(std::vector<Shortfall> shortfalls);
  const std::vector<Shortfall>& shortfalls() const { return shortfalls_; }

 private:
  std::vector<Shortfall> shortfalls_;
};

// Seeded sample without replacement per entry. Output entries follow spec
// order; within an entry they are sorted by id. Only phonesets of used
// languages are carried over.
corpus::CorpusManifest Materialize(const StrategySpec& spec,
                                   const corpus::CorpusManifest& pool,
                                   std::uint64_t seed,
                                   const Binding& binding = {});

}  // namespace polyloop::strategies

#endif  // POLYLOOP_STRATEGIES_STRATEGY_H_
