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

// Runs every primary acceptance criterion and prints one PASS/FAIL line
// per criterion. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "polyloop/acoustic/model.h"
#include "polyloop/classweight/class_weights.h"
#include "polyloop/common/random.h"
#include "polyloop/corpus/synthetic.h"
#include "polyloop/mushra/design.h"
#include "polyloop/mushra/report.h"
#include "polyloop/mushra/stats.h"
#include "polyloop/service/http_server.h"
#include "polyloop/service/rating_service.h"
#include "polyloop/strategies/strategy.h"
#include "polyloop/trainer/trainer.h"
#include "support/finite_difference.h"
#include "support/mushra_fixture.h"
#include "support/temp_dir.h"
#include "support/wilcoxon_oracle.h"

namespace {

using namespace polyloop;
using json = nlohmann::json;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures without stopping at the first one.
class Verdict {
 public:
  void Require(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void Note(const std::string& text) { notes_.push_back(text); }
  Outcome Finish() const {
    Outcome o;
    o.pass = failed_ == 0;
    std::ostringstream s;
    for (std::size_t i = 0; i < notes_.size(); ++i) s << (i ? "; " : "") << notes_[i];
    if (!o.pass) {
      s << (notes_.empty() ? "" : "; ") << failed_ << " failed:";
      for (const auto& f : failures_) s << " [" << f << "]";
    }
    o.detail = s.str();
    return o;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
  std::size_t failed_ = 0;
};

std::string Fmt(double v, int precision = 3) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double RelErr(long double got, long double want) {
  return static_cast<double>(std::fabs(got - want) / std::max(std::fabs(want), 1e-300L));
}

// ------------------------------------------------------------ class weights

// Straight transcription of the weighting formula in extended precision.
struct WeightOracle {
  std::vector<long double> raw, normalized;
  explicit WeightOracle(const std::vector<std::uint64_t>& counts) {
    long double total = 0;
    for (auto c : counts) total += c;
    const long double n = counts.size();
    long double mass = 0;
    for (auto c : counts) {
      raw.push_back(std::sqrt(total / (c * n)));
      mass += c * raw.back();
    }
    for (auto a : raw) normalized.push_back(a * total / mass);
  }
};

classweight::ClassCounts Counts(const std::vector<std::uint64_t>& counts) {
  classweight::ClassCounts cc;
  for (std::size_t i = 0; i < counts.size(); ++i) cc.classes.push_back("c" + std::to_string(i));
  cc.counts = counts;
  return cc;
}

Outcome ClassWeights() {
  Verdict v;
  {
    classweight::ClassWeightTable t(Counts({2000, 16000}));
    WeightOracle o({2000, 16000});
    double worst = 0;
    for (std::size_t i = 0; i < 2; ++i) {
      worst = std::max({worst, RelErr(t.raw()[i], o.raw[i]),
                        RelErr(t.normalized()[i], o.normalized[i])});
    }
    v.Require(worst <= 1e-9, "[2000,16000] relative error " + Fmt(worst));
    v.Note("[2000,16000] -> raw " + Fmt(t.raw()[0], 6) + "/" + Fmt(t.raw()[1], 6) +
           ", normalized " + Fmt(t.normalized()[0], 6) + "/" + Fmt(t.normalized()[1], 6));
  }
  Rng rng(20260101);
  double worst_mass = 0, worst_oracle = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::uint64_t> counts(1 + rng.Below(12));
    for (auto& c : counts) c = 1 + rng.Below(100000);
    classweight::ClassWeightTable t(Counts(counts));
    WeightOracle o(counts);
    long double mass = 0, total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      mass += counts[i] * static_cast<long double>(t.normalized()[i]);
      total += counts[i];
      worst_oracle = std::max(worst_oracle, RelErr(t.normalized()[i], o.normalized[i]));
    }
    worst_mass = std::max(worst_mass, RelErr(mass, total));
  }
  v.Require(worst_mass <= 1e-9, "mass conservation error " + Fmt(worst_mass));
  v.Require(worst_oracle <= 1e-9, "oracle error " + Fmt(worst_oracle));
  v.Note("1000 vectors: max mass error " + Fmt(worst_mass) + ", max oracle error " +
         Fmt(worst_oracle));
  return v.Finish();
}

Outcome BalancedWeights() {
  Verdict v;
  const double lo = std::nextafter(1.0, 0.0), hi = std::nextafter(1.0, 2.0);
  int tables = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::uint64_t c : {1ULL, 7ULL, 2000ULL, 16000ULL, 123457ULL}) {
      classweight::ClassWeightTable t(Counts(std::vector<std::uint64_t>(n, c)));
      ++tables;
      for (double w : t.normalized()) {
        v.Require(w >= lo && w <= hi, std::to_string(n) + "x" + std::to_string(c) + " -> " +
                                          Fmt(w, 17));
      }
    }
  }
  v.Note(std::to_string(tables) + " equal-count tables within one ulp of 1");
  return v.Finish();
}

// ----------------------------------------------------------------- acoustic

acoustic::ModelConfig MicroConfig() {
  acoustic::ModelConfig c;
  c.embedding_dim = 6;
  c.buffer_size = 8;
  c.buffer_dim = 6;
  c.speaker_dim = 4;
  c.hidden_dim = 8;
  c.recurrency_layers = 2;
  c.recurrency_width = 16;
  c.mel_bins = 5;
  c.attention_components = 2;
  c.languages = {{"aa", 3}, {"bb", 4}};
  c.speakers = {"s1", "s2"};
  c.input_offset = -1.5;
  c.input_scale = 2.0;
  c.init_seed = 7;
  return c;
}

corpus::UtterancePtr RandomUtterance(const std::string& id, const std::string& speaker,
                                     const std::string& language, std::vector<int> phonemes,
                                     std::size_t frames, std::size_t bins, std::uint64_t seed) {
  auto u = std::make_shared<corpus::Utterance>();
  u->id = id;
  u->speaker = speaker;
  u->language = language;
  u->phonemes = std::move(phonemes);
  Rng rng(seed);
  std::vector<float> data(frames * bins);
  for (auto& x : data) x = static_cast<float>(rng.Uniform(-4, 1));
  u->mel = corpus::MelSpectrogram(frames, bins, std::move(data));
  return u;
}

Outcome GradientCorrectness() {
  Verdict v;
  acoustic::AcousticModel<double> model(MicroConfig());
  const std::vector<corpus::UtterancePart> batch = {
      corpus::WholeUtterance(RandomUtterance("u", "s2", "aa", {2, 1}, 4, 5, 11))};
  model.params().ZeroGrad();
  model.AccumulateGradients(batch, nullptr);
  const auto check = testing::CheckGradients<double>(
      model.params(),
      [&] {
        num::Tape<double> t(false);
        return model.TeacherForcedLoss(t, batch, nullptr).value().item();
      },
      1e-6, 1e-4);
  v.Require(check.max_relative_error < 1e-4,
            "worst " + check.worst_parameter + "[" + std::to_string(check.worst_index) + "]");
  v.Note(std::to_string(check.checked) + " scalars, max relative error " +
         Fmt(check.max_relative_error) + " at " + check.worst_parameter);
  return v.Finish();
}

Outcome EncoderSeparation() {
  Verdict v;
  auto config = MicroConfig();
  config.embedding_dim = 16;
  acoustic::AcousticModel<float> model(config);
  const std::vector<corpus::UtterancePart> batch = {
      corpus::WholeUtterance(RandomUtterance("a1", "s1", "aa", {0, 2, 1, 1}, 9, 5, 1)),
      corpus::WholeUtterance(RandomUtterance("a2", "s2", "aa", {1, 0}, 6, 5, 2))};
  model.params().ZeroGrad();
  model.AccumulateGradients(batch, nullptr);
  std::size_t b_scalars = 0, a_nonzero = 0;
  for (std::size_t p = 0; p < model.params().size(); ++p) {
    const auto& param = model.params().at(p);
    const bool is_b = param.name.rfind("encoder/bb/", 0) == 0;
    const bool is_a = param.name.rfind("encoder/aa/", 0) == 0;
    for (float g : param.grad.values()) {
      if (is_b) {
        ++b_scalars;
        v.Require(g == 0.0f, param.name + " gradient " + Fmt(g));
      }
      a_nonzero += is_a && g != 0.0f;
    }
  }
  v.Require(b_scalars > 0, "language B has no encoder parameters");
  v.Require(a_nonzero > 0, "language A encoder received no gradient");
  v.Note(std::to_string(b_scalars) + " language-B encoder gradients exactly zero, " +
         std::to_string(a_nonzero) + " language-A gradients non-zero");
  return v.Finish();
}

// Mean absolute error, padding the shorter sequence with its last frame.
double MelMae(const corpus::MelSpectrogram& got, const corpus::MelSpectrogram& want) {
  const std::size_t frames = std::max(got.frames(), want.frames());
  double sum = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t b = 0; b < want.bins(); ++b) {
      const float p = got.frames() ? got.at(std::min(f, got.frames() - 1), b) : 0.0f;
      sum += std::abs(p - want.at(std::min(f, want.frames() - 1), b));
    }
  }
  return sum / static_cast<double>(frames * want.bins());
}

Outcome OverfitSanity() {
  Verdict v;
  corpus::SyntheticCorpusConfig sc;
  sc.languages = {{"xx", 12}};
  sc.speakers = {{"a", "xx", 5}, {"b", "xx", 5}};
  sc.mel_bins = 80;
  sc.seed = 3;
  const auto corp = corpus::GenerateSyntheticCorpus(sc);

  // The recipe at desk scale: a narrower network, fewer steps, and a
  // stage-2 learning rate raised to match.
  acoustic::ModelConfig mc;
  mc.embedding_dim = 32;
  mc.buffer_size = 10;
  mc.buffer_dim = 16;
  mc.speaker_dim = 16;
  mc.hidden_dim = 64;
  mc.recurrency_width = 64;
  mc = acoustic::ModelConfig::FromCorpus(corp, mc);
  acoustic::AcousticModel<float> model(mc);

  trainer::TrainPlan plan;
  plan.pretrain.batch_size = 32;
  plan.pretrain_steps = 300;
  plan.finetune.batch_size = 10;
  plan.finetune.learning_rate = 3e-3;
  plan.finetune_steps = 2000;
  plan.input_noise = 1.0;
  plan.seed = 1;
  trainer::Trainer t(model, corp, plan, nullptr);
  const auto stages = t.Run(trainer::StageSelection::kBoth);
  const double ratio = stages.back().final_loss() / stages.front().initial_loss();
  v.Require(ratio <= 0.10, "loss ratio " + Fmt(ratio));
  v.Note("loss " + Fmt(stages.front().initial_loss(), 4) + " -> " +
         Fmt(stages.back().final_loss(), 4) + " (ratio " + Fmt(ratio) + ")");

  double worst = 0;
  std::size_t length_errors = 0;
  for (const auto& u : corp.utterances) {
    const auto s = model.Synthesize(u->phonemes, u->language, u->speaker, 3 * u->frames());
    const double rel = MelMae(s.mel, u->mel) / (u->mel.Max() - u->mel.Min());
    worst = std::max(worst, rel);
    length_errors += s.mel.frames() != u->frames();
    v.Require(rel <= 0.10, u->id + " relative MAE " + Fmt(rel));
  }
  v.Note("synthesis MAE / range worst " + Fmt(worst) + " over " +
         std::to_string(corp.utterances.size()) + " sentences, " +
         std::to_string(length_errors) + " with wrong length");
  return v.Finish();
}

// ------------------------------------------------------------------ corpus

Outcome Chunking() {
  Verdict v;
  Rng rng(77);
  std::vector<corpus::UtterancePtr> utterances;
  std::size_t excluded = 0;
  for (int i = 0; i < 400; ++i) {
    const std::size_t frames = 1 + rng.Below(1200);
    excluded += frames > 800;
    utterances.push_back(RandomUtterance("u" + std::to_string(i), "s", "xx", {0}, frames, 3,
                                         1000 + static_cast<std::uint64_t>(i)));
  }
  const auto parts = corpus::ChunkAll(utterances);
  std::map<const corpus::Utterance*, corpus::MelSpectrogram> joined;
  std::map<const corpus::Utterance*, std::size_t> next_start;
  for (const auto& p : parts) {
    v.Require(p.frames() >= 1 && p.frames() <= 200, "part of " + std::to_string(p.frames()));
    v.Require(p.source->frames() <= 800, "part from " + std::to_string(p.source->frames()));
    v.Require(p.start == next_start[p.source.get()], "gap in " + p.source->id);
    next_start[p.source.get()] = p.end();
    joined[p.source.get()].Append(p.mel);
  }
  std::size_t kept = 0;
  for (const auto& u : utterances) {
    if (u->frames() > 800) {
      v.Require(!joined.count(u.get()), u->id + " should be excluded");
      continue;
    }
    ++kept;
    v.Require(joined.count(u.get()) && joined[u.get()] == u->mel, u->id + " not lossless");
  }
  v.Note(std::to_string(parts.size()) + " parts from " + std::to_string(kept) +
         " sentences, " + std::to_string(excluded) + " over 800 frames excluded");
  return v.Finish();
}

// -------------------------------------------------------------- strategies

struct ExpectedRecipe {
  std::string name;
  std::size_t target;
  // language -> sentences per auxiliary speaker, one entry per speaker
  std::vector<std::pair<std::string, std::size_t>> auxiliaries;
};

Outcome StrategyFixtures() {
  Verdict v;
  const std::vector<std::string> european = {"nl", "fr", "de", "es", "it", "pt", "sv",
                                             "da", "nb", "fi", "pl", "ru", "el"};
  const std::vector<ExpectedRecipe> expected = {
      {"SING-2k", 2000, {}},
      {"SING-4k", 4000, {}},
      {"SING-8k", 8000, {}},
      {"MULT-2k+16k", 2000, {{"nl", 16000}}},
      {"MULT-4k+16k", 4000, {{"nl", 16000}}},
      {"MULT-8k+16k", 8000, {{"nl", 16000}}},
      {"MONO-2k+16k", 2000, {{"en-US", 16000}}},
      {"MULT-2k+2x16k", 2000, {{"nl", 16000}, {"nl", 16000}}},
      {"MULT-2k+16k+16k", 2000, {{"nl", 16000}, {"fr", 16000}}},
  };
  const auto& builtins = strategies::BuiltinSpecs();
  v.Require(builtins.size() == 10, "expected 10 builtin specs, got " +
                                       std::to_string(builtins.size()));
  for (const auto& e : expected) {
    const auto& s = strategies::FindBuiltin(e.name);
    v.Require(s.target.count == e.target && s.target.language == "en-US",
              e.name + " target");
    std::vector<std::pair<std::string, std::size_t>> aux;
    std::set<std::string> speakers = {s.target.speaker};
    for (const auto& a : s.auxiliaries) {
      aux.push_back({a.language, a.count});
      speakers.insert(a.speaker);
    }
    std::sort(aux.begin(), aux.end());
    auto want = e.auxiliaries;
    std::sort(want.begin(), want.end());
    v.Require(aux == want, e.name + " auxiliaries");
    v.Require(speakers.size() == 1 + e.auxiliaries.size(), e.name + " speakers not distinct");
  }
  {
    const auto& s = strategies::FindBuiltin("MULT-2k+16x2k");
    std::set<std::string> speakers, languages;
    bool all_2k = true;
    for (const auto& a : s.auxiliaries) {
      speakers.insert(a.speaker);
      languages.insert(a.language);
      all_2k &= a.count == 2000;
    }
    std::size_t european_count = 0;
    for (const auto& l : languages) european_count += std::count(european.begin(), european.end(), l);
    v.Require(s.target.count == 2000 && all_2k, "MULT-2k+16x2k counts");
    v.Require(speakers.size() == 16 && s.auxiliaries.size() == 16, "MULT-2k+16x2k speakers");
    v.Require(languages.size() == 14 && languages.count("ar") && european_count == 13 &&
                  !languages.count("en-US"),
              "MULT-2k+16x2k languages");
  }

  // Materialize every recipe from one pool that can satisfy all of them.
  corpus::CorpusManifest pool;
  std::map<std::pair<std::string, std::string>, std::size_t> need;
  for (const auto& s : builtins) {
    auto& t = need[{s.target.speaker, s.target.language}];
    t = std::max(t, s.target.count + 500);
    for (const auto& a : s.auxiliaries) {
      auto& n = need[{a.speaker, a.language}];
      n = std::max(n, a.count + 500);
    }
  }
  for (const auto& [key, n] : need) {
    pool.phonesets[key.second] = key.second + ".txt";
    for (std::size_t i = 0; i < n; ++i) {
      pool.entries.push_back({key.first + "-" + std::to_string(i), key.first, key.second,
                              "p", "m", 10});
    }
  }
  std::size_t total = 0;
  for (const auto& s : builtins) {
    const auto a = strategies::Materialize(s, pool, 5);
    const auto b = strategies::Materialize(s, pool, 5);
    const auto c = strategies::Materialize(s, pool, 6);
    const auto counts = a.Counts();
    v.Require(counts.at({s.target.speaker, s.target.language}) == s.target.count,
              s.name + " target count");
    for (const auto& aux : s.auxiliaries) {
      v.Require(counts.at({aux.speaker, aux.language}) == aux.count, s.name + " " + aux.speaker);
    }
    v.Require(a.entries.size() == s.target.count + s.AuxiliaryCount(), s.name + " total");
    bool same = a.entries.size() == b.entries.size(), differs = false;
    for (std::size_t i = 0; same && i < a.entries.size(); ++i) {
      same = a.entries[i].id == b.entries[i].id;
      differs |= a.entries[i].id != c.entries[i].id;
    }
    v.Require(same, s.name + " not seed-deterministic");
    v.Require(differs, s.name + " ignores the seed");
    total += a.entries.size();
  }
  v.Note("10 recipes match the expected table; " + std::to_string(total) +
         " sentences materialized with exact counts, same seed identical, new seed different");
  return v.Finish();
}

// ------------------------------------------------------------------ mushra

Outcome Wilcoxon() {
  Verdict v;
  Rng rng(31337);
  double worst = 0;
  std::set<std::size_t> sizes;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 12;
    sizes.insert(n);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = 10 * rng.IntInRange(0, 10);
      y[i] = 10 * rng.IntInRange(0, 10);
    }
    const auto r = mushra::WilcoxonSignedRank(x, y);
    const double oracle = testing::BruteForceWilcoxonP(x, y);
    worst = std::max(worst, std::abs(r.p_value - oracle));
    v.Require(std::abs(r.p_value - oracle) <= 1e-12,
              "trial " + std::to_string(trial) + " p " + Fmt(r.p_value, 12) + " vs " +
                  Fmt(oracle, 12));
  }
  const std::vector<double> d = {1, 2, 3, 4, 5}, zero(5, 0.0);
  const auto r = mushra::WilcoxonSignedRank(d, zero);
  v.Require(r.w_minus == 0 && r.statistic == 0, "W for [1..5] is " + Fmt(r.statistic));
  v.Require(r.exact && std::abs(r.p_value - 0.0625) < 1e-15, "p for [1..5] is " + Fmt(r.p_value, 17));
  v.Note("200 samples, n=1.." + std::to_string(*sizes.rbegin()) + ", max |p - oracle| " +
         Fmt(worst) + "; [1,2,3,4,5] -> W=" + Fmt(r.statistic) + " p=" + Fmt(r.p_value));
  return v.Finish();
}

Outcome Holm() {
  Verdict v;
  const std::vector<double> p = {0.001, 0.007, 0.02, 0.2};
  const auto d = mushra::HolmBonferroni(p, 0.05);
  const std::vector<bool> want = {true, true, true, false};
  for (std::size_t i = 0; i < p.size(); ++i) {
    v.Require(d[i].reject == want[i], "hypothesis " + std::to_string(i + 1));
  }
  for (double q : {0.0, 0.001, 0.049, 0.05, 0.0500001, 0.2, 1.0}) {
    const auto one = mushra::HolmBonferroni(std::vector<double>{q}, 0.05);
    v.Require(one[0].reject == (q <= 0.05) && one[0].adjusted == q, "m=1 at p=" + Fmt(q));
  }
  v.Note("fixture rejects 3 of 4 (adjusted " + Fmt(d[0].adjusted) + ", " + Fmt(d[1].adjusted) +
         ", " + Fmt(d[2].adjusted) + ", " + Fmt(d[3].adjusted) + "); m=1 equals raw test");
  return v.Finish();
}

const std::vector<std::string> kExperimentOne = {"SING-2k", "SING-4k", "SING-8k",
                                                 "MULT-2k+16k", "MULT-4k+16k", "MULT-8k+16k"};

enum class Kind { kNormal, kSingleAbove, kMultiAbove };

// Scores for one panel of the given kind. `avoid` maps a system to a
// value it must not take (the slider's start position).
std::map<std::string, double> MakeScores(Rng& rng, Kind kind, int margin,
                                         const std::map<std::string, int>& avoid = {}) {
  auto pick = [&](const std::string& system, int lo, int hi) {
    int value = rng.IntInRange(lo, hi);
    auto it = avoid.find(system);
    if (it != avoid.end() && it->second == value) value = value < hi ? value + 1 : value - 1;
    return value;
  };
  std::map<std::string, double> s;
  const int ref = pick("resynthesis", 50, 100 - margin - 2);
  s["resynthesis"] = ref;
  std::vector<std::string> order = kExperimentOne;
  rng.Shuffle(order);
  const std::size_t above = kind == Kind::kNormal ? 0 : kind == Kind::kSingleAbove ? 1 : 2 + rng.Below(3);
  for (std::size_t i = 0; i < order.size(); ++i) {
    s[order[i]] = i < above ? pick(order[i], ref + margin, 100)
                            : pick(order[i], 0, ref + margin - 1);
  }
  return s;
}

std::vector<Kind> AnomalyPlan(Rng& rng) {
  std::vector<Kind> kinds(300, Kind::kNormal);
  for (std::size_t i = 0; i < 15; ++i) kinds[i] = Kind::kSingleAbove;
  for (std::size_t i = 15; i < 45; ++i) kinds[i] = Kind::kMultiAbove;
  rng.Shuffle(kinds);
  return kinds;
}

Outcome AnomalyFilter() {
  Verdict v;
  const int margin = mushra::kDefaultAnomalyMargin;
  Rng rng(2468);
  const auto kinds = AnomalyPlan(rng);
  std::vector<mushra::PanelScores> records;
  std::set<std::string> injected, multi;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    mushra::PanelScores r{"p" + std::to_string(i / 10), "panel" + std::to_string(i),
                          MakeScores(rng, kinds[i], margin)};
    if (kinds[i] == Kind::kSingleAbove) injected.insert(r.panel);
    if (kinds[i] == Kind::kMultiAbove) multi.insert(r.panel);
    records.push_back(std::move(r));
  }
  const auto f = mushra::FilterAnomalies(records, "resynthesis", margin);
  std::set<std::string> discarded;
  for (const auto& r : f.discarded) discarded.insert(r.panel);
  v.Require(discarded == injected, "discarded " + std::to_string(discarded.size()) +
                                       " records, not the injected 15");
  std::size_t multi_kept = 0;
  for (const auto& r : f.kept) multi_kept += multi.count(r.panel);
  v.Require(multi_kept == multi.size(), "multi-above records dropped");

  // The same through the rating service: 30 participants submit 10 panels
  // each over HTTP, the experimenter report discards the same 15.
  testing::TempDir audio("acc_audio"), store("acc_store");
  const auto design = testing::ExperimentOneDesign(audio.path(), "anomaly");
  service::ServiceOptions options;
  options.store_dir = store.path();
  options.seed = 99;
  service::RatingService svc(options);
  svc.Configure(design);
  service::HttpServer server(svc);
  const int port = server.Start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);
  Rng rng2(1357);
  const auto kinds2 = AnomalyPlan(rng2);
  std::size_t submitted = 0, k = 0;
  for (int p = 0; p < 30; ++p) {
    const std::string who = "listener" + std::to_string(p);
    auto res = client.Post("/start", json{{"participant", who}}.dump(), "application/json");
    if (!res || res->status != 200) {
      v.Require(false, "start failed for " + who);
      break;
    }
    json start = json::parse(res->body);
    const auto panels = mushra::GeneratePanels(design, who, start["test_set"].get<std::size_t>() - 1,
                                               options.seed);
    json panel = start["panel"];
    for (std::size_t i = 0; !panel.is_null(); ++i, ++k) {
      std::map<std::string, int> initial;
      for (const auto& s : panels[i].stimuli) initial[s.system] = s.initial_value;
      const auto scores = MakeScores(rng2, kinds2[k], margin, initial);
      json record = {{"panel", panel["panel"]}, {"all_listened", true}, {"all_moved", true}};
      for (const auto& s : panels[i].stimuli) record["scores"][s.id] = static_cast<int>(scores.at(s.system));
      auto sub = client.Post("/submit", json{{"token", start["token"]}, {"record", record}}.dump(),
                             "application/json");
      if (!sub || sub->status != 200) {
        v.Require(false, "submit rejected: " + (sub ? sub->body : std::string("no response")));
        break;
      }
      ++submitted;
      panel = json::parse(sub->body)["next"];
    }
  }
  const json report = json::parse(client.Get("/report")->body);
  server.Stop();
  v.Require(submitted == 300, "service accepted " + std::to_string(submitted) + " records");
  v.Require(report["discarded"] == 15 && report["records"] == 285,
            "service report discarded " + report["discarded"].dump());
  v.Note("300 records, 15 injected, " + std::to_string(f.discarded.size()) + " discarded, " +
         std::to_string(multi_kept) + "/" + std::to_string(multi.size()) +
         " multi-above kept; via service " + std::to_string(submitted) + " submitted, " +
         report["discarded"].dump() + " discarded");
  return v.Finish();
}

Outcome ReportSchema() {
  Verdict v;
  Rng rng(8);
  std::vector<std::string> systems = {"resynthesis"};
  systems.insert(systems.end(), kExperimentOne.begin(), kExperimentOne.end());
  std::vector<mushra::PanelScores> records;
  for (int i = 0; i < 300; ++i) {
    mushra::PanelScores r{"p", "x" + std::to_string(i), {}};
    const int top = rng.IntInRange(70, 100);
    r.scores["resynthesis"] = top;
    for (const auto& s : kExperimentOne) r.scores[s] = rng.IntInRange(0, top - 1);
    records.push_back(r);
  }
  const auto report = mushra::BuildReport(records, systems, 0.05);
  const std::string text = report.ToText();
  v.Require(text.find("system\tmean\tmedian\taverage_rank") != std::string::npos,
            "table header");
  const std::regex row(R"((^|\n)resynthesis\t\d+\.\d\d\t\d+(\.\d+)?\t\d+\.\d\d\t)");
  v.Require(std::regex_search(text, row), "resynthesis row format");
  const double ref_rank = report.Summary("resynthesis").average_rank;
  for (const auto& s : report.systems) {
    if (s.system != "resynthesis") v.Require(ref_rank < s.average_rank, s.system + " ranks at least as well");
    v.Require(s.average_rank >= 1 && s.average_rank <= 7, s.system + " rank out of range");
  }
  const json j = json::parse(report.ToJson());
  for (const char* key : {"mean", "median", "average_rank"}) {
    v.Require(j["systems"][0].contains(key), std::string("json lacks ") + key);
  }
  // Five ratings whose reference row prints as 88.00 / 92 / 1.20.
  const std::vector<mushra::PanelScores> five = {
      {"a", "1", {{"R", 92}, {"M", 40}}}, {"a", "2", {{"R", 95}, {"M", 60}}},
      {"a", "3", {{"R", 70}, {"M", 80}}}, {"a", "4", {{"R", 93}, {"M", 20}}},
      {"a", "5", {{"R", 90}, {"M", 50}}}};
  const std::string small = mushra::BuildReport(five, {"R", "M"}).ToText();
  v.Require(small.find("R\t88.00\t92\t1.20") != std::string::npos, "row 88.00 / 92 / 1.20");
  v.Note("columns mean/median/average_rank; resynthesis average rank " + Fmt(ref_rank) +
         " vs best other " +
         Fmt(std::min_element(report.systems.begin() + 1, report.systems.end(),
                              [](const auto& a, const auto& b) { return a.average_rank < b.average_rank; })
                 ->average_rank) +
         "; fixture row 88.00 / 92 / 1.20");
  return v.Finish();
}

Outcome PanelGeneration() {
  Verdict v;
  testing::TempDir audio("acc_panels");
  const auto design = testing::ExperimentOneDesign(audio.path());
  std::set<std::string> orders, sliders;
  std::size_t panels_seen = 0;
  for (int p = 0; p < 6; ++p) {
    const std::string who = "participant" + std::to_string(p);
    const auto panels = mushra::GeneratePanels(design, who, p % 3, 2024);
    v.Require(panels.size() == 10, who + " got " + std::to_string(panels.size()) + " panels");
    std::string order, slider;
    for (const auto& panel : panels) {
      ++panels_seen;
      v.Require(panel.stimuli.size() == 7, panel.id + " has " + std::to_string(panel.stimuli.size()));
      const auto hidden = std::count_if(panel.stimuli.begin(), panel.stimuli.end(),
                                        [&](const auto& s) { return s.system == design.reference; });
      v.Require(hidden == 1, panel.id + " hidden reference count " + std::to_string(hidden));
      v.Require(panel.reference_audio == design.AudioPath(design.reference, panel.sentence),
                panel.id + " visible reference");
      order += panel.sentence + ":";
      for (const auto& s : panel.stimuli) {
        order += s.system + ",";
        slider += std::to_string(s.initial_value) + ",";
        v.Require(s.initial_value >= 0 && s.initial_value <= 100, "slider out of range");
      }
    }
    orders.insert(order);
    sliders.insert(slider);
  }
  v.Require(orders.size() == 6, "orderings repeat across participants");
  v.Require(sliders.size() == 6, "slider values repeat across participants");
  // Same participant, different experiment seed.
  const auto a = mushra::GeneratePanels(design, "participant0", 0, 1);
  const auto b = mushra::GeneratePanels(design, "participant0", 0, 2);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    differs |= a[i].sentence != b[i].sentence;
    for (std::size_t s = 0; s < a[i].stimuli.size(); ++s) {
      differs |= a[i].stimuli[s].system != b[i].stimuli[s].system ||
                 a[i].stimuli[s].initial_value != b[i].stimuli[s].initial_value;
    }
  }
  v.Require(differs, "seed has no effect");
  v.Note(std::to_string(panels_seen) + " panels x 7 stimuli, resynthesis once hidden and once "
         "visible; 6 participants, 6 distinct orderings and slider sets");
  return v.Finish();
}

struct Criterion {
  std::string id;
  double budget_seconds;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyloop acceptance criteria"};
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--only", only, "Run only these criteria");
  app.add_flag("--list", list, "List criteria and exit");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"class-weights", 1, ClassWeights},
      {"balanced-degeneracy", 0, BalancedWeights},
      {"gradient-correctness", 60, GradientCorrectness},
      {"encoder-separation", 0, EncoderSeparation},
      {"overfit-sanity", 900, OverfitSanity},
      {"chunking", 0, Chunking},
      {"strategy-fixtures", 0, StrategyFixtures},
      {"wilcoxon", 30, Wilcoxon},
      {"holm-bonferroni", 0, Holm},
      {"anomaly-filter", 0, AnomalyFilter},
      {"report-schema", 0, ReportSchema},
      {"panel-generation", 0, PanelGeneration},
  };
  if (list) {
    for (const auto& c : criteria) std::cout << c.id << "\n";
    return 0;
  }
  int failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over the " + Fmt(c.budget_seconds) + " s budget";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << std::left << std::setw(22) << c.id
              << std::right << std::setw(9) << std::fixed << std::setprecision(2) << secs
              << "s  " << o.detail << std::endl;
    std::cout.unsetf(std::ios::fixed);
  }
  std::cout << (ran - failures) << "/" << ran << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
