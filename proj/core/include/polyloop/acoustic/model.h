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

#ifndef POLYLOOP_ACOUSTIC_MODEL_H_
#define POLYLOOP_ACOUSTIC_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "polyloop/acoustic/model_config.h"
#include "polyloop/classweight/class_weights.h"
#include "polyloop/common/error.h"
#include "polyloop/corpus/mel.h"
#include "polyloop/corpus/utterance.h"
#include "polyloop/numcore/parameters.h"
#include "polyloop/numcore/tape.h"

namespace polyloop::acoustic {

class UnknownSpeakerError : public ValidationError {
 public:
  explicit UnknownSpeakerError(const std::string& speaker)
      : ValidationError("unknown speaker '" + speaker + "'") {}
};

class NonFiniteLossError : public Error {
 public:
  using Error::Error;
};

// Decoder state as nodes on a tape.
template <typename T>
struct DecoderState {
  num::Var<T> buffer;                // [buffer_size x buffer_dim], row 0 newest
  std::vector<num::Var<T>> hidden;   // per layer [1 x width]
  std::vector<num::Var<T>> cell;     // per layer [1 x width]
  num::Var<T> position;              // [1 x components], attention means
};

// The same state detached from any tape.
template <typename T>
struct DecoderStateValues {
  num::Tensor<T> buffer;
  std::vector<num::Tensor<T>> hidden;
  std::vector<num::Tensor<T>> cell;
  num::Tensor<T> position;
};

template <typename T>
struct StepOutput {
  num::Var<T> mel;        // [1 x mel_bins]
  num::Var<T> stop;       // [1 x 1] logit
  num::Var<T> attention;  // [1 x seq_len]
  DecoderState<T> state;
};

struct LossBreakdown {
  double total = 0;       // weighted objective
  double regression = 0;  // weighted mean of per-sample mel MAE
  double stop = 0;        // weighted mean of per-sample stop BCE
  std::vector<double> per_sample;  // unweighted, batch order
};

// Gaussian noise added to teacher-forced previous frames during training,
// with standard deviation in normalized input units.
struct TeacherNoise {
  double stddev = 0.0;
  std::uint64_t seed = 0;
};

struct SynthesisResult {
  corpus::MelSpectrogram mel;
  bool truncated = false;
  std::vector<std::vector<float>> attention;  // one row per frame
};

// Mean absolute error between [F x bins] predictions and targets.
template <typename T>
num::Var<T> RegressionLoss(num::Var<T> predicted, num::Var<T> target);

// Mean over frames of softplus(z) - y z.
template <typename T>
num::Var<T> StopLoss(num::Var<T> logits, num::Var<T> targets);

// Forward methods are const: they only read parameter values. Backward
// passes accumulate into the parameters' gradient buffers, which the
// caller zeroes between steps.
template <typename T>
class AcousticModel {
 public:
  explicit AcousticModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  num::ParameterStore<T>& params() { return params_; }
  const num::ParameterStore<T>& params() const { return params_; }

  num::Var<T> Encode(num::Tape<T>& tape, std::span<const int> phonemes,
                     const std::string& language) const;

  DecoderState<T> InitialState(num::Tape<T>& tape) const;

  StepOutput<T> DecodeStep(num::Tape<T>& tape, const DecoderState<T>& state,
                           num::Var<T> context, int speaker,
                           num::Var<T> prev_frame) const;
  StepOutput<T> DecodeStep(num::Tape<T>& tape, const DecoderState<T>& state,
                           num::Var<T> context, const std::string& speaker,
                           num::Var<T> prev_frame) const;

  static DecoderStateValues<T> Detach(const DecoderState<T>& state);
  static DecoderState<T> Attach(num::Tape<T>& tape,
                                const DecoderStateValues<T>& values);

  // Unweighted loss of one part: regression plus stop term. Frames of the
  // source preceding the part are run teacher-forced without recording to
  // produce the starting decoder state.
  num::Var<T> SampleLoss(num::Tape<T>& tape, const corpus::UtterancePart& part,
                         num::Var<T>* regression = nullptr,
                         num::Var<T>* stop = nullptr,
                         const TeacherNoise* noise = nullptr) const;

  // Weighted batch objective on a single tape. `weighter` may be null for
  // uniform weights.
  num::Var<T> TeacherForcedLoss(
      num::Tape<T>& tape, std::span<const corpus::UtterancePart> batch,
      const classweight::SampleWeighter* weighter) const;

  // Same objective, one tape per sample. Adds the gradient of the batch
  // objective into params() and returns the loss terms. Throws
  // NonFiniteLossError naming the sample when a loss is NaN or infinite.
  // With `noise`, sample i draws from a stream seeded by (seed, i).
  LossBreakdown AccumulateGradients(
      std::span<const corpus::UtterancePart> batch,
      const classweight::SampleWeighter* weighter,
      const TeacherNoise* noise = nullptr);

  // Free-running inference. Stops after the first frame whose stop
  // probability exceeds 0.5, or after max_frames (truncated).
  SynthesisResult Synthesize(std::span<const int> phonemes,
                             const std::string& language,
                             const std::string& speaker,
                             std::size_t max_frames) const;

  void Save(const std::filesystem::path& path) const;
  static AcousticModel Load(const std::filesystem::path& path);

 private:
  num::Var<T> P(num::Tape<T>& tape, const std::string& name) const;
  num::Var<T> Dense(num::Tape<T>& tape, const std::string& prefix,
                    num::Var<T> x) const;
  double SampleWeight(const corpus::UtterancePart& part,
                      const classweight::SampleWeighter* weighter) const;
  void CheckPart(const corpus::UtterancePart& part) const;

  ModelConfig config_;
  // Mutable so that const forward passes can bind parameters to a tape.
  mutable num::ParameterStore<T> params_;
};

// Number of scalars in a model built from `config`, without allocating it.
std::size_t ParameterCount(const ModelConfig& config);
// Scalars belonging to language encoders only.
std::size_t EncoderParameterCount(const ModelConfig& config);

extern template class AcousticModel<float>;
extern template class AcousticModel<double>;

}  // namespace polyloop::acoustic

#endif  // POLYLOOP_ACOUSTIC_MODEL_H_
