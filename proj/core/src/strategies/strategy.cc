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

#include "polyloop/strategies/strategy.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "polyloop/common/random.h"

namespace polyloop::strategies {

using nlohmann::json;

namespace {

StrategySpec Make(std::string name, std::size_t target_count,
                  std::vector<StrategyEntry> aux) {
  return {std::move(name), {kTargetSpeaker, kTargetLanguage, target_count},
          std::move(aux)};
}

// Fourteen auxiliary languages: thirteen European plus Arabic. Nobody says
// how the 16 speakers were spread; Dutch and French get two speakers each.
std::vector<StrategyEntry> SixteenSpeakers() {
  const char* langs[] = {"nl", "fr", "de", "es", "it", "pt", "sv",
                         "da", "nb", "fi", "pl", "ru", "el", "ar"};
  std::vector<StrategyEntry> out;
  for (const char* l : langs) {
    const int speakers = (std::string(l) == "nl" || std::string(l) == "fr") ? 2 : 1;
    for (int s = 1; s <= speakers; ++s) {
      out.push_back({std::string("aux_") + l + "_" + std::to_string(s), l, 2000});
    }
  }
  return out;
}

StrategyEntry EntryFromJson(const json& j) {
  StrategyEntry e;
  e.speaker = j.at("speaker").get<std::string>();
  e.language = j.at("language").get<std::string>();
  const auto count = j.at("count").get<long long>();
  if (count < 0) throw ValidationError("strategy: negative count for " + e.speaker);
  e.count = static_cast<std::size_t>(count);
  return e;
}

json EntryToJson(const StrategyEntry& e) {
  return {{"speaker", e.speaker}, {"language", e.language}, {"count", e.count}};
}

StrategySpec SpecFromJson(const json& j) {
  StrategySpec s;
  s.name = j.at("name").get<std::string>();
  s.target = EntryFromJson(j.at("target"));
  if (j.contains("auxiliaries")) {
    for (const auto& a : j.at("auxiliaries")) s.auxiliaries.push_back(EntryFromJson(a));
  }
  s.Validate();
  return s;
}

std::string Bound(const std::map<std::string, std::string>& m,
                  const std::string& id) {
  const auto it = m.find(id);
  return it == m.end() ? id : it->second;
}

}  // namespace

void StrategySpec::Validate() const {
  if (name.empty()) throw ValidationError("strategy: empty name");
  if (target.speaker.empty() || target.language.empty()) {
    throw ValidationError("strategy '" + name + "': target entry incomplete");
  }
  std::set<std::string> speakers = {target.speaker};
  for (const auto& a : auxiliaries) {
    if (a.speaker.empty() || a.language.empty()) {
      throw ValidationError("strategy '" + name + "': incomplete auxiliary entry");
    }
    if (!speakers.insert(a.speaker).second) {
      throw ValidationError("strategy '" + name + "': speaker '" + a.speaker +
                            "' listed twice");
    }
  }
}

std::size_t StrategySpec::AuxiliaryCount() const {
  std::size_t n = 0;
  for (const auto& a : auxiliaries) n += a.count;
  return n;
}

std::vector<std::string> StrategySpec::AuxiliaryLanguages() const {
  std::set<std::string> s;
  for (const auto& a : auxiliaries) s.insert(a.language);
  return {s.begin(), s.end()};
}

std::string StrategySpec::ToJson() const {
  json aux = json::array();
  for (const auto& a : auxiliaries) aux.push_back(EntryToJson(a));
  return json{{"name", name}, {"target", EntryToJson(target)}, {"auxiliaries", aux}}
      .dump(2);
}

const std::vector<StrategySpec>& BuiltinSpecs() {
  static const std::vector<StrategySpec> specs = [] {
    const StrategyEntry nl1{"aux_nl_1", "nl", 16000};
    const StrategyEntry nl2{"aux_nl_2", "nl", 16000};
    const StrategyEntry fr1{"aux_fr_1", "fr", 16000};
    const StrategyEntry en{"aux_en_1", kTargetLanguage, 16000};
    return std::vector<StrategySpec>{
        Make("SING-2k", 2000, {}),
        Make("SING-4k", 4000, {}),
        Make("SING-8k", 8000, {}),
        Make("MULT-2k+16k", 2000, {nl1}),
        Make("MULT-4k+16k", 4000, {nl1}),
        Make("MULT-8k+16k", 8000, {nl1}),
        Make("MONO-2k+16k", 2000, {en}),
        Make("MULT-2k+2x16k", 2000, {nl1, nl2}),
        Make("MULT-2k+16k+16k", 2000, {nl1, fr1}),
        Make("MULT-2k+16x2k", 2000, SixteenSpeakers()),
    };
  }();
  return specs;
}

const StrategySpec& FindBuiltin(const std::string& name) {
  for (const auto& s : BuiltinSpecs()) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown strategy '" + name + "'");
}

std::vector<StrategySpec> ParseSpecs(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::vector<StrategySpec> out;
    if (j.is_array()) {
      for (const auto& s : j) out.push_back(SpecFromJson(s));
    } else {
      out.push_back(SpecFromJson(j));
    }
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("strategy spec: ") + e.what());
  }
}

std::vector<StrategySpec> LoadSpecs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return ParseSpecs(s.str());
}

namespace {

std::string DescribeShortfalls(const std::vector<Shortfall>& list) {
  std::ostringstream msg;
  msg << "insufficient data:";
  for (const auto& s : list) {
    msg << " [" << s.speaker << "/" << s.language << ": requested "
        << s.requested << ", available " << s.available << "]";
  }
  return msg.str();
}

}  // namespace

InsufficientDataError::InsufficientDataError(std::vector<Shortfall> shortfalls)
    : ValidationError(DescribeShortfalls(shortfalls)),
      shortfalls_(std::move(shortfalls)) {}

corpus::CorpusManifest Materialize(const StrategySpec& spec,
                                   const corpus::CorpusManifest& pool,
                                   std::uint64_t seed, const Binding& binding) {
  spec.Validate();
  std::vector<StrategyEntry> entries = {spec.target};
  entries.insert(entries.end(), spec.auxiliaries.begin(), spec.auxiliaries.end());

  std::vector<std::vector<const corpus::ManifestEntry*>> chosen;
  std::vector<Shortfall> shortfalls;
  for (const auto& e : entries) {
    const std::string speaker = Bound(binding.speakers, e.speaker);
    const std::string language = Bound(binding.languages, e.language);
    std::vector<const corpus::ManifestEntry*> candidates;
    for (const auto& m : pool.entries) {
      if (m.speaker == speaker && m.language == language) candidates.push_back(&m);
    }
    if (candidates.size() < e.count) {
      shortfalls.push_back({speaker, language, e.count, candidates.size()});
      continue;
    }
    // Pool order must not matter, so sort before the seeded shuffle.
    std::sort(candidates.begin(), candidates.end(),
              [](auto* a, auto* b) { return a->id < b->id; });
    Rng rng(MixSeed(seed, speaker + "\t" + language));
    rng.Shuffle(candidates);
    candidates.resize(e.count);
    std::sort(candidates.begin(), candidates.end(),
              [](auto* a, auto* b) { return a->id < b->id; });
    chosen.push_back(std::move(candidates));
  }
  if (!shortfalls.empty()) throw InsufficientDataError(std::move(shortfalls));

  corpus::CorpusManifest out;
  std::set<std::string> ids;
  for (const auto& group : chosen) {
    for (const auto* m : group) {
      if (!ids.insert(m->id).second) {
        throw corpus::DuplicateIdError(m->id);
      }
      out.entries.push_back(*m);
      const auto ps = pool.phonesets.find(m->language);
      if (ps != pool.phonesets.end()) out.phonesets[m->language] = ps->second;
    }
  }
  return out;
}

}  // namespace polyloop::strategies
