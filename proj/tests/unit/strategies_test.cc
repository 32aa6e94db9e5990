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

#include <set>

#include <gtest/gtest.h>

#include "polyloop/strategies/strategy.h"

namespace polyloop::strategies {
namespace {

TEST(BuiltinSpecsTest, ExactlyTheTenRecipes) {
  std::vector<std::string> names;
  for (const auto& s : BuiltinSpecs()) names.push_back(s.name);
  const std::vector<std::string> expected = {
      "SING-2k",     "SING-4k",       "SING-8k",         "MULT-2k+16k",
      "MULT-4k+16k", "MULT-8k+16k",   "MONO-2k+16k",     "MULT-2k+2x16k",
      "MULT-2k+16k+16k", "MULT-2k+16x2k"};
  EXPECT_EQ(names, expected);
  for (const auto& s : BuiltinSpecs()) {
    EXPECT_NO_THROW(s.Validate()) << s.name;
    EXPECT_EQ(s.target.speaker, kTargetSpeaker);
    EXPECT_EQ(s.target.language, kTargetLanguage);
  }
}

TEST(BuiltinSpecsTest, SingleSpeakerRecipes) {
  EXPECT_EQ(FindBuiltin("SING-2k").target.count, 2000u);
  EXPECT_EQ(FindBuiltin("SING-4k").target.count, 4000u);
  const auto& s8 = FindBuiltin("SING-8k");
  EXPECT_EQ(s8.target.count, 8000u);
  EXPECT_TRUE(s8.auxiliaries.empty());
}

TEST(BuiltinSpecsTest, OneForeignSpeaker) {
  for (auto [name, target] : {std::pair{"MULT-2k+16k", 2000u},
                              std::pair{"MULT-4k+16k", 4000u},
                              std::pair{"MULT-8k+16k", 8000u}}) {
    const auto& s = FindBuiltin(name);
    EXPECT_EQ(s.target.count, target);
    ASSERT_EQ(s.auxiliaries.size(), 1u);
    EXPECT_EQ(s.auxiliaries[0].count, 16000u);
    EXPECT_NE(s.auxiliaries[0].language, kTargetLanguage);
  }
  // The three share the same auxiliary speaker.
  EXPECT_EQ(FindBuiltin("MULT-2k+16k").auxiliaries,
            FindBuiltin("MULT-8k+16k").auxiliaries);
}

TEST(BuiltinSpecsTest, MonolingualMultiSpeaker) {
  const auto& s = FindBuiltin("MONO-2k+16k");
  ASSERT_EQ(s.auxiliaries.size(), 1u);
  EXPECT_EQ(s.auxiliaries[0].language, kTargetLanguage);
  EXPECT_NE(s.auxiliaries[0].speaker, s.target.speaker);
  EXPECT_EQ(s.auxiliaries[0].count, 16000u);
}

TEST(BuiltinSpecsTest, TwoSpeakersOfOneForeignLanguage) {
  const auto& s = FindBuiltin("MULT-2k+2x16k");
  ASSERT_EQ(s.auxiliaries.size(), 2u);
  EXPECT_EQ(s.AuxiliaryLanguages().size(), 1u);
  EXPECT_NE(s.auxiliaries[0].speaker, s.auxiliaries[1].speaker);
  EXPECT_EQ(s.AuxiliaryCount(), 32000u);
  // Extends the MULT-2k+16k data.
  EXPECT_EQ(s.auxiliaries[0], FindBuiltin("MULT-2k+16k").auxiliaries[0]);
}

TEST(BuiltinSpecsTest, TwoForeignLanguages) {
  const auto& s = FindBuiltin("MULT-2k+16k+16k");
  ASSERT_EQ(s.auxiliaries.size(), 2u);
  EXPECT_EQ(s.AuxiliaryLanguages().size(), 2u);
  for (const auto& a : s.auxiliaries) EXPECT_EQ(a.count, 16000u);
  EXPECT_EQ(s.auxiliaries[0], FindBuiltin("MULT-2k+16k").auxiliaries[0]);
}

TEST(BuiltinSpecsTest, SixteenSpeakersFourteenLanguages) {
  const auto& s = FindBuiltin("MULT-2k+16x2k");
  EXPECT_EQ(s.target.count, 2000u);
  ASSERT_EQ(s.auxiliaries.size(), 16u);
  for (const auto& a : s.auxiliaries) {
    EXPECT_EQ(a.count, 2000u);
    EXPECT_NE(a.language, kTargetLanguage);
  }
  const auto langs = s.AuxiliaryLanguages();
  EXPECT_EQ(langs.size(), 14u);
  EXPECT_EQ(std::count(langs.begin(), langs.end(), "ar"), 1);
  std::map<std::string, int> per_language;
  for (const auto& a : s.auxiliaries) ++per_language[a.language];
  int doubled = 0;
  for (const auto& [l, n] : per_language) {
    EXPECT_LE(n, 2);
    doubled += n == 2;
  }
  EXPECT_EQ(doubled, 2);
}

TEST(BuiltinSpecsTest, EqualAuxiliaryMass) {
  EXPECT_EQ(FindBuiltin("MULT-2k+2x16k").AuxiliaryCount(), 32000u);
  EXPECT_EQ(FindBuiltin("MULT-2k+16x2k").AuxiliaryCount(), 32000u);
  EXPECT_THROW(FindBuiltin("MULT-1k"), ValidationError);
}

TEST(SpecTest, ValidationAndJson) {
  StrategySpec s{"custom", {"a", "xx", 3}, {{"b", "yy", 2}}};
  const auto back = ParseSpecs(s.ToJson());
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], s);
  const auto many = ParseSpecs("[" + s.ToJson() + "," +
                               FindBuiltin("MULT-2k+16x2k").ToJson() + "]");
  ASSERT_EQ(many.size(), 2u);
  EXPECT_EQ(many[1], FindBuiltin("MULT-2k+16x2k"));

  s.auxiliaries.push_back({"a", "zz", 1});
  EXPECT_THROW(s.Validate(), ValidationError);
  EXPECT_THROW(ParseSpecs(R"({"name":"x","target":{"speaker":"a","language":"l","count":-1}})"),
               ValidationError);
  EXPECT_THROW(ParseSpecs(R"({"name":"x"})"), ValidationError);
  EXPECT_THROW(ParseSpecs(R"({"name":"","target":{"speaker":"a","language":"l","count":1}})"),
               ValidationError);
}

corpus::CorpusManifest Pool(std::map<std::pair<std::string, std::string>, int> counts) {
  corpus::CorpusManifest m;
  for (const auto& [key, n] : counts) {
    m.phonesets[key.second] = "phonesets/" + key.second + ".txt";
    for (int i = 0; i < n; ++i) {
      m.entries.push_back({key.first + "_" + key.second + "_" + std::to_string(i),
                           key.first, key.second, "p", "m", 10});
    }
  }
  return m;
}

TEST(MaterializeTest, ExhaustivePoolSelectsAll) {
  const auto pool = Pool({{{"target", "en-US"}, 2000}});
  const auto out = Materialize(FindBuiltin("SING-2k"), pool, 1);
  EXPECT_EQ(out.entries.size(), 2000u);
  EXPECT_EQ(out.phonesets.size(), 1u);
}

TEST(MaterializeTest, ShortfallIsReportedPerEntry) {
  const auto pool = Pool({{{"target", "en-US"}, 1999}, {{"aux_nl_1", "nl"}, 16000}});
  try {
    Materialize(FindBuiltin("MULT-2k+2x16k"), pool, 1);
    FAIL();
  } catch (const InsufficientDataError& e) {
    ASSERT_EQ(e.shortfalls().size(), 2u);
    EXPECT_EQ(e.shortfalls()[0].speaker, "target");
    EXPECT_EQ(e.shortfalls()[0].available, 1999u);
    EXPECT_EQ(e.shortfalls()[1].speaker, "aux_nl_2");
    EXPECT_EQ(e.shortfalls()[1].available, 0u);
    EXPECT_NE(std::string(e.what()).find("aux_nl_2"), std::string::npos);
  }
}

TEST(MaterializeTest, CountsExactAndSeeded) {
  const auto pool = Pool({{{"target", "en-US"}, 300}, {{"aux_nl_1", "nl"}, 500},
                          {{"aux_fr_1", "fr"}, 50}});
  StrategySpec spec{"small", {"target", "en-US", 120}, {{"aux_nl_1", "nl", 200}}};
  const auto a = Materialize(spec, pool, 7);
  const auto b = Materialize(spec, pool, 7);
  const auto c = Materialize(spec, pool, 8);
  const auto counts = a.Counts();
  EXPECT_EQ(counts.at({"target", "en-US"}), 120u);
  EXPECT_EQ(counts.at({"aux_nl_1", "nl"}), 200u);
  EXPECT_EQ(a.phonesets.size(), 2u);  // French not used
  std::set<std::string> ids;
  for (const auto& e : a.entries) EXPECT_TRUE(ids.insert(e.id).second);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].id, b.entries[i].id);
  }
  bool differs = false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    differs |= a.entries[i].id != c.entries[i].id;
  }
  EXPECT_TRUE(differs);

  // Pool order does not matter.
  auto shuffled = pool;
  std::reverse(shuffled.entries.begin(), shuffled.entries.end());
  const auto d = Materialize(spec, shuffled, 7);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].id, d.entries[i].id);
  }
}

TEST(MaterializeTest, BindingMapsRolesToPoolIds) {
  const auto pool = Pool({{{"anna", "en"}, 20}, {{"bert", "nl"}, 40}});
  auto spec = FindBuiltin("MULT-2k+16k");
  spec.target.count = 10;
  spec.auxiliaries[0].count = 30;
  Binding binding;
  binding.speakers = {{"target", "anna"}, {"aux_nl_1", "bert"}};
  binding.languages = {{"en-US", "en"}};
  const auto out = Materialize(spec, pool, 3, binding);
  EXPECT_EQ(out.Counts().at({"anna", "en"}), 10u);
  EXPECT_EQ(out.Counts().at({"bert", "nl"}), 30u);
}

TEST(MaterializeTest, FullScaleBuiltinsAreExact) {
  std::map<std::pair<std::string, std::string>, int> counts;
  counts[{"target", "en-US"}] = 8000;
  for (const auto& s : BuiltinSpecs()) {
    for (const auto& a : s.auxiliaries) {
      counts[{a.speaker, a.language}] = std::max<int>(counts[{a.speaker, a.language}], a.count);
    }
  }
  const auto pool = Pool(counts);
  for (const auto& s : BuiltinSpecs()) {
    const auto out = Materialize(s, pool, 42);
    EXPECT_EQ(out.entries.size(), s.target.count + s.AuxiliaryCount()) << s.name;
    const auto c = out.Counts();
    EXPECT_EQ(c.at({s.target.speaker, s.target.language}), s.target.count);
    for (const auto& a : s.auxiliaries) {
      EXPECT_EQ(c.at({a.speaker, a.language}), a.count) << s.name;
    }
  }
}

}  // namespace
}  // namespace polyloop::strategies
