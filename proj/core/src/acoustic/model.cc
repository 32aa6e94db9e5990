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

#include "polyloop/acoustic/model.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "polyloop/common/random.h"
#include "polyloop/numcore/checkpoint.h"
#include "polyloop/numcore/ops.h"

namespace polyloop::acoustic {

namespace {

using num::Shape;
using num::Tape;
using num::Tensor;
using num::Var;

struct ParamSpec {
  std::string name;
  Shape shape;
  std::size_t fan_in;
  bool encoder;
};

void AddDense(std::vector<ParamSpec>& out, const std::string& prefix,
              std::size_t in, std::size_t outdim) {
  out.push_back({prefix + "/weight", {in, outdim}, in, false});
  out.push_back({prefix + "/bias", {1, outdim}, in, false});
}

void AddEncoder(std::vector<ParamSpec>& out, const ModelConfig& c,
                const std::string& prefix, std::size_t vocab) {
  const std::size_t d = c.embedding_dim;
  const std::size_t k = c.prenet_kernel;
  out.push_back({prefix + "/embedding", {vocab, d}, 1, true});
  for (std::size_t l = 0; l < c.prenet_layers; ++l) {
    const std::string p = prefix + "/prenet" + std::to_string(l);
    out.push_back({p + "/weight", {k, d, d}, k * d, true});
    out.push_back({p + "/bias", {1, d}, k * d, true});
  }
}

// Every parameter of the model in creation order.
std::vector<ParamSpec> Layout(const ModelConfig& c) {
  std::vector<ParamSpec> out;
  if (c.encoder == EncoderKind::kPerLanguage) {
    for (const auto& lang : c.languages) {
      AddEncoder(out, c, "encoder/" + lang.code, lang.phonemes);
    }
  } else {
    std::size_t vocab = 0;
    for (const auto& lang : c.languages) vocab += lang.phonemes;
    AddEncoder(out, c, "encoder/shared", vocab);
    out.push_back({"encoder/language/embedding",
                   {c.languages.size(), c.embedding_dim}, 1, true});
  }
  out.push_back(
      {"speaker/embedding", {c.speakers.size(), c.speaker_dim}, 1, false});

  const std::size_t flat = c.buffer_size * c.buffer_dim;
  AddDense(out, "attention/hidden", flat, c.hidden_dim);
  AddDense(out, "attention/out", c.hidden_dim, 3 * c.attention_components);
  AddDense(out, "update/hidden",
           flat + c.embedding_dim + c.mel_bins + c.speaker_dim, c.hidden_dim);
  AddDense(out, "update/out", c.hidden_dim, c.buffer_dim);
  for (std::size_t l = 0; l < c.recurrency_layers; ++l) {
    const std::size_t in =
        l == 0 ? c.buffer_dim + c.embedding_dim : c.recurrency_width;
    AddDense(out, "recurrency/" + std::to_string(l), in + c.recurrency_width,
             4 * c.recurrency_width);
  }
  AddDense(out, "output/hidden", flat + c.recurrency_width, c.hidden_dim);
  AddDense(out, "output/out", c.hidden_dim, c.mel_bins + 1);
  out.push_back({"output/speaker/weight", {c.speaker_dim, c.mel_bins},
                 c.speaker_dim, false});
  return out;
}

template <typename T>
Tensor<T> FrameTensor(std::span<const float> frame) {
  std::vector<T> v(frame.begin(), frame.end());
  return Tensor<T>({1, frame.size()}, std::move(v));
}

template <typename T>
Tensor<T> MelTensor(const corpus::MelSpectrogram& mel) {
  std::vector<T> v(mel.values().begin(), mel.values().end());
  return Tensor<T>({mel.frames(), mel.bins()}, std::move(v));
}

}  // namespace

template <typename T>
Var<T> RegressionLoss(Var<T> predicted, Var<T> target) {
  return num::Mean(num::Abs(num::Sub(predicted, target)));
}

template <typename T>
Var<T> StopLoss(Var<T> logits, Var<T> targets) {
  return num::Mean(
      num::Sub(num::Softplus(logits), num::Mul(targets, logits)));
}

std::size_t ParameterCount(const ModelConfig& config) {
  std::size_t n = 0;
  for (const auto& p : Layout(config)) n += num::ShapeProduct(p.shape);
  return n;
}

std::size_t EncoderParameterCount(const ModelConfig& config) {
  std::size_t n = 0;
  for (const auto& p : Layout(config)) {
    if (p.encoder) n += num::ShapeProduct(p.shape);
  }
  return n;
}

template <typename T>
AcousticModel<T>::AcousticModel(ModelConfig config)
    : config_(std::move(config)) {
  config_.Validate();
  for (const auto& spec : Layout(config_)) {
    // Each parameter draws from its own stream so that adding a language
    // leaves every other initial value untouched.
    Rng rng(MixSeed(config_.init_seed, spec.name));
    params_.AddUniform(spec.name, spec.shape, spec.fan_in, rng);
  }
}

template <typename T>
Var<T> AcousticModel<T>::P(Tape<T>& tape, const std::string& name) const {
  return tape.Param(params_.Get(name));
}

template <typename T>
Var<T> AcousticModel<T>::Dense(Tape<T>& tape, const std::string& prefix,
                               Var<T> x) const {
  return num::Add(num::MatMul(x, P(tape, prefix + "/weight")),
                  P(tape, prefix + "/bias"));
}

template <typename T>
Var<T> AcousticModel<T>::Encode(Tape<T>& tape, std::span<const int> phonemes,
                                const std::string& language) const {
  const int lang = config_.LanguageIndex(language);
  if (lang < 0) throw corpus::UnknownLanguageError(language, "encode");
  const std::size_t vocab = config_.languages[lang].phonemes;
  if (phonemes.empty()) throw ValidationError("encode: empty phoneme sequence");
  for (std::size_t i = 0; i < phonemes.size(); ++i) {
    if (phonemes[i] < 0 || static_cast<std::size_t>(phonemes[i]) >= vocab) {
      std::ostringstream msg;
      msg << "encode: phoneme index " << phonemes[i] << " at position " << i
          << " out of range for language '" << language << "' (" << vocab
          << " symbols)";
      throw ValidationError(msg.str());
    }
  }

  std::string prefix;
  Var<T> h;
  if (config_.encoder == EncoderKind::kPerLanguage) {
    prefix = "encoder/" + language;
    h = num::GatherRows(P(tape, prefix + "/embedding"), phonemes);
  } else {
    prefix = "encoder/shared";
    std::size_t offset = 0;
    for (int l = 0; l < lang; ++l) offset += config_.languages[l].phonemes;
    std::vector<int> shifted(phonemes.begin(), phonemes.end());
    for (int& p : shifted) p += static_cast<int>(offset);
    const int lang_row[] = {lang};
    h = num::Add(num::GatherRows(P(tape, prefix + "/embedding"),
                                 std::span<const int>(shifted)),
                 num::GatherRows(P(tape, "encoder/language/embedding"),
                                 std::span<const int>(lang_row)));
  }
  const std::size_t pad = config_.prenet_kernel / 2;
  for (std::size_t l = 0; l < config_.prenet_layers; ++l) {
    const std::string p = prefix + "/prenet" + std::to_string(l);
    h = num::Tanh(
        num::Conv1d(h, P(tape, p + "/weight"), P(tape, p + "/bias"), pad));
  }
  return h;
}

template <typename T>
DecoderState<T> AcousticModel<T>::InitialState(Tape<T>& tape) const {
  DecoderState<T> s;
  s.buffer = tape.Constant(Tensor<T>({config_.buffer_size, config_.buffer_dim}));
  for (std::size_t l = 0; l < config_.recurrency_layers; ++l) {
    s.hidden.push_back(tape.Constant(Tensor<T>({1, config_.recurrency_width})));
    s.cell.push_back(tape.Constant(Tensor<T>({1, config_.recurrency_width})));
  }
  s.position =
      tape.Constant(Tensor<T>({1, config_.attention_components}));
  return s;
}

template <typename T>
StepOutput<T> AcousticModel<T>::DecodeStep(Tape<T>& tape,
                                           const DecoderState<T>& state,
                                           Var<T> context,
                                           const std::string& speaker,
                                           Var<T> prev_frame) const {
  const int spk = config_.SpeakerIndex(speaker);
  if (spk < 0) throw UnknownSpeakerError(speaker);
  return DecodeStep(tape, state, context, spk, prev_frame);
}

template <typename T>
StepOutput<T> AcousticModel<T>::DecodeStep(Tape<T>& tape,
                                           const DecoderState<T>& state,
                                           Var<T> context, int speaker,
                                           Var<T> prev_frame) const {
  const auto& c = config_;
  const std::size_t bsz = c.buffer_size;
  const std::size_t comps = c.attention_components;
  const std::size_t width = c.recurrency_width;

  auto expect = [](const Shape& got, const Shape& want, const char* what) {
    if (got != want) {
      throw ShapeError(std::string("decode_step: ") + what + " is " +
                       num::ShapeToString(got) + ", expected " +
                       num::ShapeToString(want));
    }
  };
  expect(state.buffer.shape(), {bsz, c.buffer_dim}, "buffer");
  expect(state.position.shape(), {1, comps}, "attention position");
  if (state.hidden.size() != c.recurrency_layers ||
      state.cell.size() != c.recurrency_layers) {
    throw ShapeError("decode_step: recurrency layer count mismatch");
  }
  for (std::size_t l = 0; l < c.recurrency_layers; ++l) {
    expect(state.hidden[l].shape(), {1, width}, "hidden state");
    expect(state.cell[l].shape(), {1, width}, "cell state");
  }
  if (context.shape().size() != 2 || context.cols() != c.embedding_dim ||
      context.rows() == 0) {
    throw ShapeError("decode_step: context is " +
                     num::ShapeToString(context.shape()) + ", expected [Lx" +
                     std::to_string(c.embedding_dim) + "]");
  }
  expect(prev_frame.shape(), {1, c.mel_bins}, "previous frame");
  if (speaker < 0 || static_cast<std::size_t>(speaker) >= c.speakers.size()) {
    throw UnknownSpeakerError("#" + std::to_string(speaker));
  }
  const std::size_t len = context.rows();
  const Var<T> prev_in = num::Scale(
      num::AddScalar(prev_frame, static_cast<T>(-c.input_offset)),
      static_cast<T>(1.0 / c.input_scale));

  StepOutput<T> out;
  const Var<T> flat = num::Reshape(state.buffer, 1, bsz * c.buffer_dim);

  // Monotonic Gaussian-mixture attention driven by the buffer.
  const Var<T> a = Dense(tape, "attention/out",
                         num::Tanh(Dense(tape, "attention/hidden", flat)));
  const Var<T> log_gamma = num::Reshape(num::SliceCols(a, 0, comps), comps, 1);
  const Var<T> step = num::Exp(num::SliceCols(a, comps, 2 * comps));
  const Var<T> beta =
      num::Reshape(num::Exp(num::SliceCols(a, 2 * comps, 3 * comps)), comps, 1);
  const Var<T> position = num::Add(state.position, step);
  Tensor<T> grid({1, len});
  for (std::size_t j = 0; j < len; ++j) grid[j] = static_cast<T>(j);
  const Var<T> diff =
      num::Sub(num::Reshape(position, comps, 1), tape.Constant(std::move(grid)));
  const Var<T> logits = num::Sub(log_gamma, num::Mul(beta, num::Square(diff)));
  const Var<T> weights = num::Reshape(
      num::Softmax(num::Reshape(logits, 1, comps * len)), comps, len);
  out.attention = num::SumRows(weights);
  const Var<T> ctx = num::MatMul(out.attention, context);

  const int spk_row[] = {speaker};
  const Var<T> z = num::GatherRows(P(tape, "speaker/embedding"),
                                   std::span<const int>(spk_row));

  const Var<T> row =
      Dense(tape, "update/out",
            num::Tanh(Dense(tape, "update/hidden",
                            num::ConcatCols<T>({flat, ctx, prev_in, z}))));
  out.state.buffer =
      bsz == 1 ? row
               : num::ConcatRows<T>({row, num::SliceRows(state.buffer, 0, bsz - 1)});
  out.state.position = position;

  Var<T> x = num::ConcatCols<T>({row, ctx});
  for (std::size_t l = 0; l < c.recurrency_layers; ++l) {
    const Var<T> gates = Dense(tape, "recurrency/" + std::to_string(l),
                               num::ConcatCols<T>({x, state.hidden[l]}));
    const Var<T> in = num::Sigmoid(num::SliceCols(gates, 0, width));
    const Var<T> forget = num::Sigmoid(num::SliceCols(gates, width, 2 * width));
    const Var<T> cand = num::Tanh(num::SliceCols(gates, 2 * width, 3 * width));
    const Var<T> outg = num::Sigmoid(num::SliceCols(gates, 3 * width, 4 * width));
    const Var<T> cell =
        num::Add(num::Mul(forget, state.cell[l]), num::Mul(in, cand));
    const Var<T> hidden = num::Mul(outg, num::Tanh(cell));
    out.state.hidden.push_back(hidden);
    out.state.cell.push_back(cell);
    x = hidden;
  }

  const Var<T> new_flat = num::Reshape(out.state.buffer, 1, bsz * c.buffer_dim);
  const Var<T> o =
      Dense(tape, "output/out",
            num::Tanh(Dense(tape, "output/hidden",
                            num::ConcatCols<T>({new_flat, x}))));
  out.mel = num::Add(num::SliceCols(o, 0, c.mel_bins),
                     num::MatMul(z, P(tape, "output/speaker/weight")));
  out.stop = num::SliceCols(o, c.mel_bins, c.mel_bins + 1);
  return out;
}

template <typename T>
DecoderStateValues<T> AcousticModel<T>::Detach(const DecoderState<T>& s) {
  DecoderStateValues<T> v;
  v.buffer = s.buffer.value();
  for (const auto& h : s.hidden) v.hidden.push_back(h.value());
  for (const auto& c : s.cell) v.cell.push_back(c.value());
  v.position = s.position.value();
  return v;
}

template <typename T>
DecoderState<T> AcousticModel<T>::Attach(Tape<T>& tape,
                                         const DecoderStateValues<T>& v) {
  DecoderState<T> s;
  s.buffer = tape.Constant(v.buffer);
  for (const auto& h : v.hidden) s.hidden.push_back(tape.Constant(h));
  for (const auto& c : v.cell) s.cell.push_back(tape.Constant(c));
  s.position = tape.Constant(v.position);
  return s;
}

template <typename T>
void AcousticModel<T>::CheckPart(const corpus::UtterancePart& part) const {
  if (!part.source) throw ValidationError("loss: part without source");
  const auto& u = *part.source;
  if (config_.LanguageIndex(u.language) < 0) {
    throw corpus::UnknownLanguageError(u.language, "utterance " + u.id);
  }
  if (config_.SpeakerIndex(u.speaker) < 0) throw UnknownSpeakerError(u.speaker);
  if (part.frames() == 0 || part.end() > u.frames()) {
    throw ValidationError("loss: part of '" + u.id + "' has bad frame range");
  }
  if (part.mel.bins() != config_.mel_bins || u.mel.bins() != config_.mel_bins) {
    throw ValidationError("loss: utterance '" + u.id + "' has " +
                          std::to_string(part.mel.bins()) +
                          " mel bins, model expects " +
                          std::to_string(config_.mel_bins));
  }
}

template <typename T>
Var<T> AcousticModel<T>::SampleLoss(Tape<T>& tape,
                                    const corpus::UtterancePart& part,
                                    Var<T>* regression, Var<T>* stop,
                                    const TeacherNoise* noise) const {
  CheckPart(part);
  const auto& u = *part.source;
  const int spk = config_.SpeakerIndex(u.speaker);
  const std::size_t bins = config_.mel_bins;

  const bool noisy = noise && noise->stddev > 0;
  Rng rng(noisy ? noise->seed : 0);
  const double sigma = noisy ? noise->stddev * config_.input_scale : 0.0;
  auto previous = [&](std::size_t g) {
    Tensor<T> frame = g == 0 ? Tensor<T>({1, bins})
                             : FrameTensor<T>(u.mel.frame(g - 1));
    if (noisy) {
      for (T& v : frame.values()) v += static_cast<T>(sigma * rng.Normal());
    }
    return frame;
  };

  DecoderState<T> state;
  if (part.start == 0) {
    state = InitialState(tape);
  } else {
    // Warm-up over the preceding frames; one throwaway tape per step keeps
    // memory flat.
    Tensor<T> ctx_value;
    DecoderStateValues<T> values;
    {
      Tape<T> t(false);
      ctx_value = Encode(t, u.phonemes, u.language).value();
      values = Detach(InitialState(t));
    }
    for (std::size_t g = 0; g < part.start; ++g) {
      Tape<T> t(false);
      auto out = DecodeStep(t, Attach(t, values), t.Constant(ctx_value), spk,
                            t.Constant(previous(g)));
      values = Detach(out.state);
    }
    state = Attach(tape, values);
  }

  const Var<T> context = Encode(tape, u.phonemes, u.language);
  std::vector<Var<T>> mels, stops;
  Tensor<T> stop_targets({part.frames(), 1});
  for (std::size_t g = part.start; g < part.end(); ++g) {
    auto out = DecodeStep(tape, state, context, spk, tape.Constant(previous(g)));
    mels.push_back(out.mel);
    stops.push_back(out.stop);
    state = out.state;
    if (g + 1 == u.frames()) stop_targets[g - part.start] = T(1);
  }
  const Var<T> reg = RegressionLoss(num::ConcatRows(mels),
                                    tape.Constant(MelTensor<T>(part.mel)));
  const Var<T> stp =
      StopLoss(num::ConcatRows(stops), tape.Constant(std::move(stop_targets)));
  if (regression) *regression = reg;
  if (stop) *stop = stp;
  return num::Add(reg, stp);
}

template <typename T>
double AcousticModel<T>::SampleWeight(
    const corpus::UtterancePart& part,
    const classweight::SampleWeighter* weighter) const {
  if (!weighter) return 1.0;
  return weighter->Weight(part.source->speaker, part.source->language);
}

namespace {

void CheckFinite(double value, const corpus::UtterancePart& part,
                 const char* what) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite " << what << " (" << value << ") for utterance '"
        << part.source->id << "' frames [" << part.start << ", " << part.end()
        << ")";
    throw NonFiniteLossError(msg.str());
  }
}

}  // namespace

template <typename T>
Var<T> AcousticModel<T>::TeacherForcedLoss(
    Tape<T>& tape, std::span<const corpus::UtterancePart> batch,
    const classweight::SampleWeighter* weighter) const {
  if (batch.empty()) throw ValidationError("loss: empty batch");
  std::vector<double> w;
  for (const auto& part : batch) {
    CheckPart(part);
    w.push_back(SampleWeight(part, weighter));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  Var<T> loss;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Var<T> l = SampleLoss(tape, batch[i]);
    CheckFinite(l.value().item(), batch[i], "loss");
    const Var<T> term = num::Scale(l, static_cast<T>(w[i] / total));
    loss = i == 0 ? term : num::Add(loss, term);
  }
  return loss;
}

template <typename T>
LossBreakdown AcousticModel<T>::AccumulateGradients(
    std::span<const corpus::UtterancePart> batch,
    const classweight::SampleWeighter* weighter, const TeacherNoise* noise) {
  if (batch.empty()) throw ValidationError("loss: empty batch");
  std::vector<double> w;
  for (const auto& part : batch) {
    CheckPart(part);
    w.push_back(SampleWeight(part, weighter));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  LossBreakdown out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Tape<T> tape(true);
    Var<T> reg, stp;
    TeacherNoise sample_noise;
    if (noise) {
      sample_noise = {noise->stddev,
                      MixSeed(noise->seed, "sample" + std::to_string(i))};
    }
    const Var<T> l =
        SampleLoss(tape, batch[i], &reg, &stp, noise ? &sample_noise : nullptr);
    const double value = l.value().item();
    CheckFinite(value, batch[i], "loss");
    const double share = w[i] / total;
    tape.Backward(num::Scale(l, static_cast<T>(share)));
    out.per_sample.push_back(value);
    out.total += share * value;
    out.regression += share * reg.value().item();
    out.stop += share * stp.value().item();
  }
  for (std::size_t p = 0; p < params_.size(); ++p) {
    for (T g : params_.at(p).grad.values()) {
      if (!std::isfinite(static_cast<double>(g))) {
        throw NonFiniteLossError("non-finite gradient in parameter '" +
                                 params_.at(p).name + "'");
      }
    }
  }
  return out;
}

template <typename T>
SynthesisResult AcousticModel<T>::Synthesize(std::span<const int> phonemes,
                                             const std::string& language,
                                             const std::string& speaker,
                                             std::size_t max_frames) const {
  const int spk = config_.SpeakerIndex(speaker);
  if (spk < 0) throw UnknownSpeakerError(speaker);
  const std::size_t bins = config_.mel_bins;
  SynthesisResult result;
  result.mel = corpus::MelSpectrogram(0, bins);

  Tensor<T> ctx_value;
  DecoderStateValues<T> values;
  {
    Tape<T> t(false);
    ctx_value = Encode(t, phonemes, language).value();
    values = Detach(InitialState(t));
  }
  Tensor<T> prev({1, bins});
  std::vector<float> frames;
  bool stopped = false;
  for (std::size_t f = 0; f < max_frames; ++f) {
    Tape<T> t(false);
    auto out = DecodeStep(t, Attach(t, values), t.Constant(ctx_value), spk,
                          t.Constant(prev));
    values = Detach(out.state);
    prev = out.mel.value();
    for (T v : prev.values()) frames.push_back(static_cast<float>(v));
    const auto& att = out.attention.value().values();
    result.attention.emplace_back(att.begin(), att.end());
    if (out.stop.value().item() > T(0)) {  // sigmoid > 0.5
      stopped = true;
      break;
    }
  }
  result.truncated = !stopped;
  const std::size_t n = frames.size() / bins;
  result.mel = corpus::MelSpectrogram(n, bins, std::move(frames));
  return result;
}

template <typename T>
void AcousticModel<T>::Save(const std::filesystem::path& path) const {
  num::SaveCheckpoint(path.string(), params_, config_.ToJson());
}

template <typename T>
AcousticModel<T> AcousticModel<T>::Load(const std::filesystem::path& path) {
  auto ckpt = num::LoadCheckpoint<T>(path.string());
  AcousticModel model(ModelConfig::FromJson(ckpt.metadata));
  if (ckpt.params.size() != model.params_.size()) {
    throw IoError(path.string() + ": checkpoint holds " +
                  std::to_string(ckpt.params.size()) +
                  " parameters, config implies " +
                  std::to_string(model.params_.size()));
  }
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    const auto& src = ckpt.params.at(i);
    if (!model.params_.Contains(src.name)) {
      throw IoError(path.string() + ": unexpected parameter '" + src.name + "'");
    }
    auto& dst = model.params_.Get(src.name);
    if (dst.value.shape() != src.value.shape()) {
      throw IoError(path.string() + ": shape mismatch for '" + src.name + "'");
    }
    dst.value = src.value;
  }
  return model;
}

template Var<float> RegressionLoss(Var<float>, Var<float>);
template Var<double> RegressionLoss(Var<double>, Var<double>);
template Var<float> StopLoss(Var<float>, Var<float>);
template Var<double> StopLoss(Var<double>, Var<double>);
template class AcousticModel<float>;
template class AcousticModel<double>;

}  // namespace polyloop::acoustic
