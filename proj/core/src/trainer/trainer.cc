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

#include "polyloop/trainer/trainer.h"

#include <chrono>
#include <ctime>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"

namespace polyloop::trainer {

using nlohmann::json;

std::string ToString(Stage stage) {
  return stage == Stage::kPretrain ? "pretrain" : "finetune";
}

StageSelection ParseStageSelection(const std::string& text) {
  if (text == "pretrain") return StageSelection::kPretrain;
  if (text == "finetune") return StageSelection::kFinetune;
  if (text == "both") return StageSelection::kBoth;
  throw ValidationError("unknown stage '" + text +
                        "' (expected pretrain, finetune or both)");
}

namespace {

json PlanToJson(const TrainPlan& p) {
  return {
      {"pretrain",
       {{"optimizer", "momentum_sgd"},
        {"learning_rate", p.pretrain.learning_rate},
        {"momentum", p.pretrain.momentum},
        {"batch_size", p.pretrain.batch_size},
        {"steps", p.pretrain_steps},
        {"max_sentence_frames", p.max_sentence_frames},
        {"max_part_frames", p.max_part_frames}}},
      {"finetune",
       {{"optimizer", "adam"},
        {"learning_rate", p.finetune.learning_rate},
        {"beta1", p.finetune.beta1},
        {"beta2", p.finetune.beta2},
        {"epsilon", p.finetune.epsilon},
        {"batch_size", p.finetune.batch_size},
        {"steps", p.finetune_steps}}},
      {"weighting", p.weighting},
      {"grad_clip", p.grad_clip},
      {"input_noise", p.input_noise},
      {"divergence_factor", p.divergence_factor},
      {"divergence_patience", p.divergence_patience},
      {"seed", p.seed},
  };
}

std::string Timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

std::string TrainPlan::ToJson() const { return PlanToJson(*this).dump(2); }

TrainPlan TrainPlan::FromJson(const std::string& text) {
  TrainPlan p;
  try {
    const json j = json::parse(text);
    auto get = [](const json& obj, const char* key, auto& field) {
      if (obj.contains(key)) obj.at(key).get_to(field);
    };
    if (j.contains("pretrain")) {
      const auto& s = j.at("pretrain");
      get(s, "learning_rate", p.pretrain.learning_rate);
      get(s, "momentum", p.pretrain.momentum);
      get(s, "batch_size", p.pretrain.batch_size);
      get(s, "steps", p.pretrain_steps);
      get(s, "max_sentence_frames", p.max_sentence_frames);
      get(s, "max_part_frames", p.max_part_frames);
    }
    if (j.contains("finetune")) {
      const auto& s = j.at("finetune");
      get(s, "learning_rate", p.finetune.learning_rate);
      get(s, "beta1", p.finetune.beta1);
      get(s, "beta2", p.finetune.beta2);
      get(s, "epsilon", p.finetune.epsilon);
      get(s, "batch_size", p.finetune.batch_size);
      get(s, "steps", p.finetune_steps);
    }
    get(j, "weighting", p.weighting);
    get(j, "grad_clip", p.grad_clip);
    get(j, "input_noise", p.input_noise);
    get(j, "divergence_factor", p.divergence_factor);
    get(j, "divergence_patience", p.divergence_patience);
    get(j, "seed", p.seed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("train plan: ") + e.what());
  }
  return p;
}

void TrainPlan::Validate() const {
  if (pretrain.batch_size == 0 || finetune.batch_size == 0) {
    throw ValidationError("train plan: batch sizes must be positive");
  }
  if (pretrain.learning_rate < 0 || finetune.learning_rate < 0) {
    throw ValidationError("train plan: negative learning rate");
  }
  if (pretrain.momentum < 0 || pretrain.momentum >= 1) {
    throw ValidationError("train plan: momentum must be in [0, 1)");
  }
  if (finetune.beta1 < 0 || finetune.beta1 >= 1 || finetune.beta2 < 0 ||
      finetune.beta2 >= 1) {
    throw ValidationError("train plan: betas must be in [0, 1)");
  }
  if (input_noise < 0) throw ValidationError("train plan: negative input_noise");
  if (divergence_patience == 0) {
    throw ValidationError("train plan: divergence_patience must be positive");
  }
  if (weighting != "auto") classweight::ParseWeightingMode(weighting);
}

classweight::WeightingMode ResolveWeighting(const std::string& weighting,
                                            const corpus::Corpus& corpus) {
  if (weighting != "auto") return classweight::ParseWeightingMode(weighting);
  std::set<std::string> speakers, languages;
  for (const auto& u : corpus.utterances) {
    speakers.insert(u->speaker);
    languages.insert(u->language);
  }
  if (languages.size() > 1) {
    return classweight::WeightingMode::kSpeakerAndLanguage;
  }
  if (speakers.size() > 1) return classweight::WeightingMode::kSpeaker;
  return classweight::WeightingMode::kNone;
}

std::string ConfigHashInput(const TrainPlan& plan,
                            const acoustic::ModelConfig& model) {
  const json j = {{"plan", PlanToJson(plan)},
                  {"model", json::parse(model.ToJson())}};
  return j.dump();  // keys sorted, no whitespace
}

std::string ConfigHash(const TrainPlan& plan,
                       const acoustic::ModelConfig& model) {
  const std::string input = ConfigHashInput(plan, model);
  const std::uint64_t h = Fnv1a(input);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TrainLog::TrainLog(const std::filesystem::path& path)
    : out_(std::make_unique<std::ofstream>(path, std::ios::app)) {
  if (!*out_) throw IoError("cannot open train log " + path.string());
}

void TrainLog::Append(const std::string& line) {
  lines_.push_back(line);
  if (out_) {
    *out_ << line << '\n';
    out_->flush();
  }
}

std::vector<std::string> TrainLog::WithoutTiming() const {
  std::vector<std::string> out;
  for (const auto& line : lines_) {
    json j = json::parse(line);
    j.erase("wall_ms");
    j.erase("wall_clock");
    out.push_back(j.dump());
  }
  return out;
}

BatchSampler::BatchSampler(std::size_t n, std::uint64_t seed)
    : n_(n), rng_(seed), cursor_(n) {
  if (n == 0) throw ValidationError("batch sampler: empty data set");
}

std::vector<std::size_t> BatchSampler::Next(std::size_t batch_size) {
  std::vector<std::size_t> out;
  out.reserve(batch_size);
  while (out.size() < batch_size) {
    if (cursor_ == n_) {
      order_.resize(n_);
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      rng_.Shuffle(order_);
      cursor_ = 0;
    }
    out.push_back(order_[cursor_++]);
  }
  return out;
}

Trainer::Trainer(acoustic::AcousticModel<float>& model,
                 const corpus::Corpus& corpus, TrainPlan plan, TrainLog* log)
    : model_(model),
      corpus_(corpus),
      plan_(std::move(plan)),
      log_(log),
      weighter_([&] {
        plan_.Validate();
        std::map<std::string, std::size_t> spk, lang;
        for (const auto& u : corpus.utterances) {
          ++spk[u->speaker];
          ++lang[u->language];
        }
        if (spk.empty()) throw ValidationError("trainer: empty corpus");
        return classweight::SampleWeighter(
            ResolveWeighting(plan_.weighting, corpus), spk, lang);
      }()) {
  parts_ = corpus::ChunkAll(corpus.utterances, plan_.max_sentence_frames,
                            plan_.max_part_frames);
  for (const auto& u : corpus.utterances) {
    sentences_.push_back(corpus::WholeUtterance(u));
  }
  config_hash_ = ConfigHash(plan_, model_.config());
}

void Trainer::Log(const std::string& line) {
  if (log_) log_->Append(line);
}

template <typename Optimizer>
StageResult Trainer::RunStage(Stage stage,
                              const std::vector<corpus::UtterancePart>& data,
                              std::size_t batch_size, std::size_t steps,
                              Optimizer& optimizer) {
  using Clock = std::chrono::steady_clock;
  if (!header_written_) {
    Log(json{{"type", "header"},
             {"seed", plan_.seed},
             {"config_hash", config_hash_},
             {"weighting", classweight::ToString(weighter_.mode())},
             {"plan", PlanToJson(plan_)},
             {"model", json::parse(model_.config().ToJson())},
             {"wall_clock", Timestamp()}}
            .dump());
    header_written_ = true;
  }
  if (data.empty()) {
    throw ValidationError("trainer: no training samples for " + ToString(stage));
  }

  StageResult result;
  result.stage = stage;
  BatchSampler sampler(data.size(), MixSeed(plan_.seed, ToString(stage)));
  auto& params = model_.params();
  std::map<std::string, std::pair<double, std::size_t>> spk_total, lang_total;
  std::size_t streak = 0;
  const auto stage_start = Clock::now();

  for (std::size_t step = 0; step < steps; ++step) {
    const auto t0 = Clock::now();
    std::vector<corpus::UtterancePart> batch;
    for (std::size_t i : sampler.Next(batch_size)) batch.push_back(data[i]);

    params.ZeroGrad();
    const acoustic::TeacherNoise noise{
        plan_.input_noise,
        MixSeed(plan_.seed, ToString(stage) + std::to_string(step))};
    const auto loss = model_.AccumulateGradients(
        batch, &weighter_, plan_.input_noise > 0 ? &noise : nullptr);
    const double norm = ClipGradients(params, plan_.grad_clip);
    result.losses.push_back(loss.total);

    if (step > 0 && loss.total > plan_.divergence_factor * result.initial_loss()) {
      if (++streak >= plan_.divergence_patience) {
        throw DivergenceError(
            ToString(stage) + " diverged: loss above " +
            std::to_string(plan_.divergence_factor) + "x the initial value (" +
            std::to_string(result.initial_loss()) + ") for " +
            std::to_string(streak) + " consecutive steps, last " +
            std::to_string(loss.total));
      }
    } else {
      streak = 0;
    }
    optimizer.Step(params);

    std::map<std::string, std::pair<double, std::size_t>> spk, lang;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& u = *batch[i].source;
      for (auto* m : {&spk, &spk_total}) {
        (*m)[u.speaker].first += loss.per_sample[i];
        ++(*m)[u.speaker].second;
      }
      for (auto* m : {&lang, &lang_total}) {
        (*m)[u.language].first += loss.per_sample[i];
        ++(*m)[u.language].second;
      }
    }
    auto means = [](const auto& m) {
      json j = json::object();
      for (const auto& [k, v] : m) j[k] = v.first / v.second;
      return j;
    };
    Log(json{{"type", "step"},
             {"stage", ToString(stage)},
             {"step", step},
             {"seed", plan_.seed},
             {"config_hash", config_hash_},
             {"loss", loss.total},
             {"regression", loss.regression},
             {"stop", loss.stop},
             {"grad_norm", norm},
             {"speaker_loss", means(spk)},
             {"language_loss", means(lang)},
             {"wall_ms", std::chrono::duration<double, std::milli>(
                             Clock::now() - t0)
                             .count()}}
            .dump());

    if (step + 1 == steps) {
      Log(json{{"type", "stage_end"},
               {"stage", ToString(stage)},
               {"steps", steps},
               {"initial_loss", result.initial_loss()},
               {"final_loss", result.final_loss()},
               {"speaker_loss", means(spk_total)},
               {"language_loss", means(lang_total)},
               {"wall_ms", std::chrono::duration<double, std::milli>(
                               Clock::now() - stage_start)
                               .count()}}
              .dump());
    }
  }
  result.steps = steps;
  return result;
}

StageResult Trainer::Pretrain() {
  MomentumSgd<float> opt(plan_.pretrain);
  return RunStage(Stage::kPretrain, parts_, plan_.pretrain.batch_size,
                  plan_.pretrain_steps, opt);
}

StageResult Trainer::Finetune() {
  Adam<float> opt(plan_.finetune);
  return RunStage(Stage::kFinetune, sentences_, plan_.finetune.batch_size,
                  plan_.finetune_steps, opt);
}

std::vector<StageResult> Trainer::Run(StageSelection selection) {
  std::vector<StageResult> out;
  if (selection != StageSelection::kFinetune) out.push_back(Pretrain());
  if (selection != StageSelection::kPretrain) out.push_back(Finetune());
  return out;
}

}  // namespace polyloop::trainer
