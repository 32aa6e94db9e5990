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

#ifndef POLYLOOP_TRAINER_TRAINER_H_
#define POLYLOOP_TRAINER_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polyloop/acoustic/model.h"
#include "polyloop/classweight/class_weights.h"
#include "polyloop/common/error.h"
#include "polyloop/common/random.h"
#include "polyloop/corpus/manifest.h"
#include "polyloop/trainer/optimizer.h"

namespace polyloop::trainer {

class DivergenceError : public Error {
 public:
  using Error::Error;
};

enum class Stage { kPretrain, kFinetune };
enum class StageSelection { kPretrain, kFinetune, kBoth };

std::string ToString(Stage stage);
StageSelection ParseStageSelection(const std::string& text);

struct TrainPlan {
  SgdConfig pretrain;
  AdamConfig finetune;
  // Step counts are not given by any source; defaults are sized so a
  // synthetic corpus trains in minutes on one core.
  std::size_t pretrain_steps = 500;
  std::size_t finetune_steps = 200;
  std::size_t max_sentence_frames = corpus::kPretrainMaxSentenceFrames;
  std::size_t max_part_frames = corpus::kPretrainMaxPartFrames;
  // "auto" picks speaker weighting for one language with several
  // speakers and speaker+language weighting for several languages.
  std::string weighting = "auto";
  double grad_clip = 1.0;  // global norm; 0 disables
  // Std of Gaussian noise on teacher-forced input frames, in normalized
  // units. Reduces the gap between teacher forcing and free running.
  double input_noise = 0.0;
  double divergence_factor = 10.0;
  std::size_t divergence_patience = 100;
  std::uint64_t seed = 1;

  std::string ToJson() const;
  static TrainPlan FromJson(const std::string& json);
  void Validate() const;
};

// The weighting actually applied for a corpus under `plan.weighting`.
classweight::WeightingMode ResolveWeighting(const std::string& weighting,
                                            const corpus::Corpus& corpus);

// Canonical text hashed into TrainLog records: plan and model config.
std::string ConfigHashInput(const TrainPlan& plan,
                            const acoustic::ModelConfig& model);
std::string ConfigHash(const TrainPlan& plan,
                       const acoustic::ModelConfig& model);

// Line-delimited JSON records, appended in order. Every record has a
// "type" field: "header", "step" or "stage_end".
class TrainLog {
 public:
  TrainLog() = default;
  // Also appends each record to `path` as it is written.
  explicit TrainLog(const std::filesystem::path& path);

  void Append(const std::string& json_line);
  const std::vector<std::string>& lines() const { return lines_; }
  // Records with wall-clock fields removed, for reproducibility checks.
  std::vector<std::string> WithoutTiming() const;

 private:
  std::vector<std::string> lines_;
  std::unique_ptr<std::ofstream> out_;
};

struct StageResult {
  Stage stage = Stage::kPretrain;
  std::size_t steps = 0;
  std::vector<double> losses;  // one per step, before the update
  double initial_loss() const { return losses.empty() ? 0 : losses.front(); }
  double final_loss() const { return losses.empty() ? 0 : losses.back(); }
};

// Runs the two stages on a model it does not own.
class Trainer {
 public:
  Trainer(acoustic::AcousticModel<float>& model, const corpus::Corpus& corpus,
          TrainPlan plan, TrainLog* log = nullptr);

  StageResult Pretrain();
  StageResult Finetune();
  std::vector<StageResult> Run(StageSelection selection);

  classweight::WeightingMode weighting() const { return weighter_.mode(); }
  const classweight::SampleWeighter& weighter() const { return weighter_; }
  const std::vector<corpus::UtterancePart>& pretrain_parts() const {
    return parts_;
  }

 private:
  template <typename Optimizer>
  StageResult RunStage(Stage stage, const std::vector<corpus::UtterancePart>& data,
                       std::size_t batch_size, std::size_t steps,
                       Optimizer& optimizer);
  void Log(const std::string& line);

  acoustic::AcousticModel<float>& model_;
  const corpus::Corpus& corpus_;
  TrainPlan plan_;
  TrainLog* log_;
  classweight::SampleWeighter weighter_;
  std::vector<corpus::UtterancePart> parts_;
  std::vector<corpus::UtterancePart> sentences_;
  std::string config_hash_;
  bool header_written_ = false;
};

// Deterministic batch order: consecutive slices of a stream of seeded
// permutations of [0, n). A batch larger than n spans several passes.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::uint64_t seed);
  std::vector<std::size_t> Next(std::size_t batch_size);

 private:
  std::size_t n_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_;
};

}  // namespace polyloop::trainer

#endif  // POLYLOOP_TRAINER_TRAINER_H_
