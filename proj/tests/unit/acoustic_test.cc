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

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "polyloop/acoustic/model.h"
#include "polyloop/corpus/manifest.h"
#include "polyloop/numcore/ops.h"
#include "support/finite_difference.h"
#include "support/temp_dir.h"

namespace polyloop::acoustic {
namespace {

using corpus::MelSpectrogram;
using corpus::Utterance;
using corpus::UtterancePart;
using corpus::UtterancePtr;
using num::Tape;
using num::Tensor;
using num::Var;

ModelConfig Micro() {
  ModelConfig c;
  c.embedding_dim = 6;
  c.prenet_layers = 3;
  c.prenet_kernel = 5;
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
  c.init_seed = 7;
  return c;
}

UtterancePtr MakeUtterance(const std::string& id, const std::string& speaker,
                           const std::string& language, std::vector<int> phon,
                           std::size_t frames, std::size_t bins,
                           std::uint64_t seed) {
  auto u = std::make_shared<Utterance>();
  u->id = id;
  u->speaker = speaker;
  u->language = language;
  u->phonemes = std::move(phon);
  u->mel = MelSpectrogram(frames, bins);
  Rng rng(seed);
  for (float& v : u->mel.values()) v = static_cast<float>(rng.Uniform(-2, 1));
  return u;
}

TEST(ModelConfigTest, JsonRoundTrip) {
  ModelConfig c = Micro();
  c.encoder = EncoderKind::kLanguageEmbedding;
  const ModelConfig back = ModelConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  EXPECT_EQ(back.languages[1].phonemes, 4u);
  EXPECT_EQ(back.encoder, EncoderKind::kLanguageEmbedding);
}

TEST(ModelConfigTest, ValidationNamesField) {
  ModelConfig c = Micro();
  c.prenet_kernel = 4;
  EXPECT_THROW(c.Validate(), ValidationError);
  c = Micro();
  c.buffer_size = 0;
  try {
    c.Validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("buffer_size"), std::string::npos);
  }
  c = Micro();
  c.languages.push_back({"aa", 3});
  EXPECT_THROW(c.Validate(), ValidationError);
  c = Micro();
  c.languages[0].phonemes = 0;
  EXPECT_THROW(c.Validate(), ValidationError);
  EXPECT_THROW(ModelConfig::FromJson("{nope"), ValidationError);
}

TEST(EncodeTest, ShapeWithDefaultWidth) {
  ModelConfig c;
  c.buffer_size = 2;
  c.buffer_dim = 4;
  c.hidden_dim = 4;
  c.recurrency_width = 4;
  c.speaker_dim = 4;
  c.languages = {{"en", 40}};
  c.speakers = {"x"};
  AcousticModel<float> model(c);
  Tape<float> tape(false);
  const std::vector<int> phon = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto ctx = model.Encode(tape, phon, "en");
  EXPECT_EQ(ctx.shape(), (num::Shape{10, 256}));
}

TEST(EncodeTest, LanguagesHaveDisjointEncoders) {
  AcousticModel<double> model(Micro());
  Tape<double> tape(false);
  const std::vector<int> phon = {0, 1, 2};
  const auto a = model.Encode(tape, phon, "aa").value();
  const auto b = model.Encode(tape, phon, "bb").value();
  EXPECT_FALSE(a == b);
}

TEST(EncodeTest, RejectsBadInput) {
  AcousticModel<double> model(Micro());
  Tape<double> tape(false);
  const std::vector<int> ok = {0, 1};
  const std::vector<int> bad = {0, 3};
  EXPECT_THROW(model.Encode(tape, ok, "zz"), corpus::UnknownLanguageError);
  EXPECT_THROW(model.Encode(tape, bad, "aa"), ValidationError);
  EXPECT_NO_THROW(model.Encode(tape, bad, "bb"));
}

TEST(EncodeTest, GradientNeverReachesOtherLanguage) {
  AcousticModel<double> model(Micro());
  auto u1 = MakeUtterance("u1", "s1", "aa", {0, 2, 1}, 5, 5, 1);
  auto u2 = MakeUtterance("u2", "s2", "aa", {1, 1}, 3, 5, 2);
  const std::vector<UtterancePart> batch = {corpus::WholeUtterance(u1),
                                            corpus::WholeUtterance(u2)};
  model.params().ZeroGrad();
  Tape<double> tape;
  tape.Backward(model.TeacherForcedLoss(tape, batch, nullptr));

  bool a_nonzero = false;
  for (std::size_t p = 0; p < model.params().size(); ++p) {
    const auto& param = model.params().at(p);
    const bool is_b = param.name.rfind("encoder/bb/", 0) == 0;
    const bool is_a = param.name.rfind("encoder/aa/", 0) == 0;
    for (double g : param.grad.values()) {
      if (is_b) ASSERT_EQ(g, 0.0) << param.name;
      if (is_a && g != 0.0) a_nonzero = true;
    }
  }
  EXPECT_TRUE(a_nonzero);
}

class DecodeTest : public ::testing::Test {
 protected:
  DecodeTest() : model_(Micro()) {}
  AcousticModel<double> model_;
};

TEST_F(DecodeTest, AttentionIsADistribution) {
  Tape<double> tape(false);
  const std::vector<int> phon = {0, 1, 2, 1, 0, 2, 2, 1, 0, 1};
  const auto ctx = model_.Encode(tape, phon, "aa");
  auto state = model_.InitialState(tape);
  auto prev = tape.Constant(Tensor<double>({1, 5}));
  for (int step = 0; step < 12; ++step) {
    auto out = model_.DecodeStep(tape, state, ctx, "s2", prev);
    const auto& w = out.attention.value();
    ASSERT_EQ(w.shape(), (num::Shape{1, 10}));
    double sum = 0;
    for (double v : w.values()) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
    EXPECT_EQ(out.mel.shape(), (num::Shape{1, 5}));
    EXPECT_EQ(out.stop.shape(), (num::Shape{1, 1}));
    state = out.state;
    prev = out.mel;
  }
}

TEST_F(DecodeTest, AttentionPositionNeverMovesBack) {
  Tape<double> tape(false);
  const std::vector<int> phon = {0, 1, 2};
  const auto ctx = model_.Encode(tape, phon, "aa");
  auto state = model_.InitialState(tape);
  auto prev = tape.Constant(Tensor<double>({1, 5}));
  for (int step = 0; step < 6; ++step) {
    auto out = model_.DecodeStep(tape, state, ctx, "s1", prev);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_GT(out.state.position.value()[k], state.position.value()[k]);
    }
    state = out.state;
  }
}

TEST_F(DecodeTest, StepIsDeterministic) {
  Tape<double> tape(false);
  const std::vector<int> phon = {2, 0};
  const auto ctx = model_.Encode(tape, phon, "aa");
  const auto state = model_.InitialState(tape);
  auto prev = tape.Constant(Tensor<double>({1, 5}, 0.25));
  auto a = model_.DecodeStep(tape, state, ctx, "s1", prev);
  auto b = model_.DecodeStep(tape, state, ctx, "s1", prev);
  EXPECT_EQ(a.mel.value(), b.mel.value());
  EXPECT_EQ(a.stop.value(), b.stop.value());
  EXPECT_EQ(a.attention.value(), b.attention.value());
  EXPECT_EQ(a.state.buffer.value(), b.state.buffer.value());
}

// Reference implementation of the buffer update in plain loops.
std::vector<double> DenseRef(const num::ParameterStore<double>& ps,
                             const std::string& prefix,
                             const std::vector<double>& x) {
  const auto& w = ps.Get(prefix + "/weight").value;
  const auto& b = ps.Get(prefix + "/bias").value;
  std::vector<double> y(w.cols());
  for (std::size_t j = 0; j < w.cols(); ++j) {
    double acc = b[j];
    for (std::size_t i = 0; i < w.rows(); ++i) acc += x[i] * w(i, j);
    y[j] = acc;
  }
  return y;
}

TEST_F(DecodeTest, BufferShiftsByOneRow) {
  Tape<double> tape(false);
  const std::vector<int> phon = {1, 2, 0, 0};
  const auto ctx = model_.Encode(tape, phon, "aa");
  auto state = model_.InitialState(tape);
  // Fill the buffer with distinct values first.
  Tensor<double> buf({8, 6});
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = 0.01 * i - 0.2;
  state.buffer = tape.Constant(buf);
  Tensor<double> prev_v({1, 5});
  for (std::size_t i = 0; i < 5; ++i) prev_v[i] = 0.1 * i;
  auto out = model_.DecodeStep(tape, state, ctx, "s2", tape.Constant(prev_v));
  const auto& next = out.state.buffer.value();
  ASSERT_EQ(next.shape(), (num::Shape{8, 6}));
  for (std::size_t r = 1; r < 8; ++r) {
    for (std::size_t c = 0; c < 6; ++c) {
      ASSERT_EQ(next(r, c), buf(r - 1, c)) << r << "," << c;
    }
  }

  // Row 0 from the update network, evaluated independently.
  const auto& ps = model_.params();
  const auto& att = out.attention.value();
  const auto& cv = ctx.value();
  std::vector<double> x(buf.values().begin(), buf.values().end());
  for (std::size_t d = 0; d < 6; ++d) {
    double acc = 0;
    for (std::size_t j = 0; j < cv.rows(); ++j) acc += att[j] * cv(j, d);
    x.push_back(acc);
  }
  for (double v : prev_v.values()) x.push_back(v);
  const auto& spk = ps.Get("speaker/embedding").value;
  for (std::size_t d = 0; d < 4; ++d) x.push_back(spk(1, d));
  auto h = DenseRef(ps, "update/hidden", x);
  for (double& v : h) v = std::tanh(v);
  const auto row = DenseRef(ps, "update/out", h);
  for (std::size_t c = 0; c < 6; ++c) EXPECT_NEAR(next(0, c), row[c], 1e-12);
}

TEST_F(DecodeTest, RejectsMismatchedState) {
  Tape<double> tape(false);
  const std::vector<int> phon = {1};
  const auto ctx = model_.Encode(tape, phon, "aa");
  auto state = model_.InitialState(tape);
  const auto prev = tape.Constant(Tensor<double>({1, 5}));
  auto bad = state;
  bad.buffer = tape.Constant(Tensor<double>({7, 6}));
  EXPECT_THROW(model_.DecodeStep(tape, bad, ctx, "s1", prev), ShapeError);
  bad = state;
  bad.hidden.pop_back();
  EXPECT_THROW(model_.DecodeStep(tape, bad, ctx, "s1", prev), ShapeError);
  EXPECT_THROW(model_.DecodeStep(tape, state, ctx, "s1",
                                 tape.Constant(Tensor<double>({1, 4}))),
               ShapeError);
  EXPECT_THROW(model_.DecodeStep(tape, state, ctx, "nobody", prev),
               UnknownSpeakerError);
}

TEST(LossTest, RegressionIsZeroOnTargets) {
  Tape<double> tape;
  const auto x = tape.Constant(Tensor<double>::Matrix(2, 2, {1, -2, 3, 0.5}));
  EXPECT_EQ(RegressionLoss(x, x).value().item(), 0.0);
}

TEST(LossTest, StopLossMatchesClosedForm) {
  Tape<double> tape;
  const auto z = tape.Constant(Tensor<double>::Matrix(2, 1, {0.3, -1.2}));
  const auto y = tape.Constant(Tensor<double>::Matrix(2, 1, {0.0, 1.0}));
  const double expect =
      (std::log1p(std::exp(0.3)) + std::log1p(std::exp(1.2))) / 2;
  EXPECT_NEAR(StopLoss(z, y).value().item(), expect, 1e-14);
}

TEST(LossTest, EqualClassWeightsMatchUniform) {
  AcousticModel<double> model(Micro());
  auto u1 = MakeUtterance("u1", "s1", "aa", {0, 2}, 4, 5, 3);
  auto u2 = MakeUtterance("u2", "s2", "bb", {3, 1, 2}, 6, 5, 4);
  const std::vector<UtterancePart> batch = {corpus::WholeUtterance(u1),
                                            corpus::WholeUtterance(u2)};
  classweight::SampleWeighter weighter(
      classweight::WeightingMode::kSpeakerAndLanguage, {{"s1", 5}, {"s2", 5}},
      {{"aa", 5}, {"bb", 5}});
  Tape<double> t1, t2;
  const double uniform = model.TeacherForcedLoss(t1, batch, nullptr).value().item();
  const double weighted =
      model.TeacherForcedLoss(t2, batch, &weighter).value().item();
  EXPECT_NEAR(uniform, weighted, 1e-14);
}

TEST(LossTest, WeightsFollowFormula) {
  AcousticModel<double> model(Micro());
  auto u1 = MakeUtterance("u1", "s1", "aa", {0, 2}, 4, 5, 3);
  auto u2 = MakeUtterance("u2", "s2", "bb", {3, 1, 2}, 6, 5, 4);
  const std::vector<UtterancePart> batch = {corpus::WholeUtterance(u1),
                                            corpus::WholeUtterance(u2)};
  classweight::SampleWeighter weighter(classweight::WeightingMode::kSpeaker,
                                       {{"s1", 2000}, {"s2", 16000}},
                                       {{"aa", 1}, {"bb", 1}});
  Tape<double> tape;
  const double l1 = model.SampleLoss(tape, batch[0]).value().item();
  const double l2 = model.SampleLoss(tape, batch[1]).value().item();
  const double w1 = weighter.Weight("s1", "aa");
  const double w2 = weighter.Weight("s2", "bb");
  const double total =
      model.TeacherForcedLoss(tape, batch, &weighter).value().item();
  EXPECT_NEAR(total, (w1 * l1 + w2 * l2) / (w1 + w2), 1e-12);
}

TEST(LossTest, PerSampleTapesMatchSingleTape) {
  AcousticModel<double> model(Micro());
  auto u1 = MakeUtterance("u1", "s1", "aa", {0, 2}, 7, 5, 5);
  auto u2 = MakeUtterance("u2", "s2", "bb", {3, 1, 2}, 6, 5, 6);
  auto parts = corpus::ChunkForPretraining(u1, 10, 3);
  parts.push_back(corpus::WholeUtterance(u2));
  classweight::SampleWeighter weighter(classweight::WeightingMode::kSpeaker,
                                       {{"s1", 3}, {"s2", 9}},
                                       {{"aa", 1}, {"bb", 1}});
  model.params().ZeroGrad();
  Tape<double> tape;
  const auto loss = model.TeacherForcedLoss(tape, parts, &weighter);
  tape.Backward(loss);
  const num::ParameterStore<double> single = model.params();

  model.params().ZeroGrad();
  const auto breakdown = model.AccumulateGradients(parts, &weighter);
  EXPECT_NEAR(breakdown.total, loss.value().item(), 1e-12);
  EXPECT_NEAR(breakdown.total, breakdown.regression + breakdown.stop, 1e-12);
  ASSERT_EQ(breakdown.per_sample.size(), parts.size());
  for (std::size_t p = 0; p < single.size(); ++p) {
    const auto& a = single.at(p).grad;
    const auto& b = model.params().at(p).grad;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_NEAR(a[i], b[i], 1e-12) << single.at(p).name;
    }
  }
}

// A part starting mid-utterance must see the same decoder state as the
// corresponding frames of a full teacher-forced pass.
TEST(LossTest, WarmUpReproducesFullPass) {
  AcousticModel<double> model(Micro());
  auto u = MakeUtterance("u", "s1", "bb", {3, 0, 1, 2}, 9, 5, 8);
  const auto parts = corpus::ChunkForPretraining(u, 20, 4);
  ASSERT_EQ(parts.size(), 3u);

  Tape<double> tape(false);
  double full_sum = 0;
  for (const auto& part : parts) {
    Var<double> reg;
    model.SampleLoss(tape, part, &reg);
    full_sum += reg.value().item() * part.frames();
  }
  Var<double> whole_reg;
  model.SampleLoss(tape, corpus::WholeUtterance(u), &whole_reg);
  EXPECT_NEAR(full_sum / 9.0, whole_reg.value().item(), 1e-12);
}

TEST(LossTest, NonFiniteLossIsReported) {
  AcousticModel<double> model(Micro());
  model.params().Get("output/out/bias").value[0] = std::nan("");
  auto u = MakeUtterance("bad_utt", "s1", "aa", {0}, 2, 5, 9);
  const std::vector<UtterancePart> batch = {corpus::WholeUtterance(u)};
  try {
    model.AccumulateGradients(batch, nullptr);
    FAIL();
  } catch (const NonFiniteLossError& e) {
    EXPECT_NE(std::string(e.what()).find("bad_utt"), std::string::npos);
  }
}

TEST(LossTest, RejectsUnknownClassesAndBins) {
  AcousticModel<double> model(Micro());
  auto u = MakeUtterance("u", "ghost", "aa", {0}, 2, 5, 9);
  std::vector<UtterancePart> batch = {corpus::WholeUtterance(u)};
  Tape<double> tape;
  EXPECT_THROW(model.TeacherForcedLoss(tape, batch, nullptr),
               UnknownSpeakerError);
  batch = {corpus::WholeUtterance(MakeUtterance("u", "s1", "aa", {0}, 2, 7, 9))};
  EXPECT_THROW(model.TeacherForcedLoss(tape, batch, nullptr), ValidationError);
  EXPECT_THROW(model.TeacherForcedLoss(tape, {}, nullptr), ValidationError);
}

TEST(GradientCheckTest, MicroModelMatchesFiniteDifferences) {
  AcousticModel<double> model(Micro());
  auto u = MakeUtterance("u", "s2", "aa", {2, 1}, 4, 5, 11);
  const std::vector<UtterancePart> batch = {corpus::WholeUtterance(u)};
  model.params().ZeroGrad();
  {
    Tape<double> tape;
    tape.Backward(model.TeacherForcedLoss(tape, batch, nullptr));
  }
  const auto check = testing::CheckGradients<double>(
      model.params(),
      [&] {
        Tape<double> t(false);
        return model.TeacherForcedLoss(t, batch, nullptr).value().item();
      },
      1e-6, 1e-4);
  EXPECT_GT(check.checked, 1000u);
  EXPECT_LT(check.max_relative_error, 1e-4)
      << check.worst_parameter << "[" << check.worst_index
      << "] analytic=" << check.analytic << " numeric=" << check.numeric;
}

TEST(ParameterCountTest, MatchesAllocatedModel) {
  const ModelConfig c = Micro();
  AcousticModel<float> model(c);
  EXPECT_EQ(ParameterCount(c), model.params().ScalarCount());

  // Closed form for the micro config.
  const std::size_t enc_aa = 3 * 6 + 3 * (5 * 6 * 6 + 6);
  const std::size_t enc_bb = 4 * 6 + 3 * (5 * 6 * 6 + 6);
  EXPECT_EQ(EncoderParameterCount(c), enc_aa + enc_bb);
  const std::size_t flat = 48;
  const std::size_t rest =
      2 * 4 + (flat * 8 + 8) + (8 * 6 + 6) + ((flat + 6 + 5 + 4) * 8 + 8) +
      (8 * 6 + 6) + ((6 + 6 + 16) * 64 + 64) + ((16 + 16) * 64 + 64) +
      ((flat + 16) * 8 + 8) + (8 * 6 + 6) + 4 * 5;
  EXPECT_EQ(ParameterCount(c), enc_aa + enc_bb + rest);
}

TEST(ParameterCountTest, AddingLanguageOnlyGrowsEncoders) {
  ModelConfig c = Micro();
  const std::size_t before = ParameterCount(c);
  const std::size_t enc_before = EncoderParameterCount(c);
  c.languages.push_back({"cc", 9});
  EXPECT_EQ(ParameterCount(c) - before, EncoderParameterCount(c) - enc_before);
  EXPECT_EQ(EncoderParameterCount(c) - enc_before, 9 * 6 + 3 * (5 * 6 * 6 + 6));
}

TEST(ParameterCountTest, InitIsIndependentOfLanguageList) {
  ModelConfig c = Micro();
  AcousticModel<float> a(c);
  c.languages.push_back({"cc", 9});
  AcousticModel<float> b(c);
  EXPECT_EQ(a.params().Get("attention/hidden/weight").value,
            b.params().Get("attention/hidden/weight").value);
  EXPECT_EQ(a.params().Get("encoder/aa/embedding").value,
            b.params().Get("encoder/aa/embedding").value);
}

TEST(LanguageEmbeddingTest, SharedEncoderVariant) {
  ModelConfig c = Micro();
  c.encoder = EncoderKind::kLanguageEmbedding;
  AcousticModel<double> model(c);
  EXPECT_TRUE(model.params().Contains("encoder/language/embedding"));
  EXPECT_FALSE(model.params().Contains("encoder/aa/embedding"));
  EXPECT_EQ(EncoderParameterCount(c),
            7 * 6 + 3 * (5 * 6 * 6 + 6) + 2 * 6);
  Tape<double> tape(false);
  const std::vector<int> phon = {0, 1, 2};
  EXPECT_FALSE(model.Encode(tape, phon, "aa").value() ==
               model.Encode(tape, phon, "bb").value());
}

TEST(SynthesizeTest, ZeroFramesIsEmptyAndTruncated) {
  AcousticModel<float> model(Micro());
  const std::vector<int> phon = {0, 1};
  const auto r = model.Synthesize(phon, "aa", "s1", 0);
  EXPECT_EQ(r.mel.frames(), 0u);
  EXPECT_EQ(r.mel.bins(), 5u);
  EXPECT_TRUE(r.truncated);
}

TEST(SynthesizeTest, BoundedByMaxFrames) {
  AcousticModel<float> model(Micro());
  // Push the stop logit far negative so the decoder never stops.
  model.params().Get("output/out/bias").value[5] = -100.0f;
  const std::vector<int> phon = {0, 1};
  const auto r = model.Synthesize(phon, "aa", "s1", 7);
  EXPECT_EQ(r.mel.frames(), 7u);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.attention.size(), 7u);
}

TEST(SynthesizeTest, StopsOnStopLogit) {
  AcousticModel<float> model(Micro());
  model.params().Get("output/out/bias").value[5] = 100.0f;
  const std::vector<int> phon = {0, 1};
  const auto r = model.Synthesize(phon, "aa", "s1", 7);
  EXPECT_EQ(r.mel.frames(), 1u);
  EXPECT_FALSE(r.truncated);
}

TEST(SynthesizeTest, UnknownSpeaker) {
  AcousticModel<float> model(Micro());
  const std::vector<int> phon = {0};
  EXPECT_THROW(model.Synthesize(phon, "aa", "ghost", 3), UnknownSpeakerError);
}

TEST(CheckpointTest, ReloadedModelIsBitIdentical) {
  testing::TempDir dir("acoustic_ckpt");
  AcousticModel<float> model(Micro());
  // Move away from the seeded init so the test cannot pass by re-init.
  for (std::size_t p = 0; p < model.params().size(); ++p) {
    for (float& v : model.params().at(p).value.values()) v *= 1.5f;
  }
  model.Save(dir.file("m.ckpt"));
  const auto loaded = AcousticModel<float>::Load(dir.file("m.ckpt"));
  EXPECT_EQ(loaded.config().ToJson(), model.config().ToJson());
  const std::vector<int> phon = {2, 0, 1};
  const auto a = model.Synthesize(phon, "aa", "s2", 6);
  const auto b = loaded.Synthesize(phon, "aa", "s2", 6);
  EXPECT_EQ(a.mel, b.mel);
  EXPECT_EQ(a.attention, b.attention);
  EXPECT_THROW(AcousticModel<double>::Load(dir.file("m.ckpt")), IoError);
}

}  // namespace
}  // namespace polyloop::acoustic
