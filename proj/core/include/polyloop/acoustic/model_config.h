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

#ifndef POLYLOOP_ACOUSTIC_MODEL_CONFIG_H_
#define POLYLOOP_ACOUSTIC_MODEL_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "polyloop/corpus/manifest.h"

namespace polyloop::acoustic {

struct LanguageSpec {
  std::string code;
  std::size_t phonemes = 0;  // phoneset size
};

enum class EncoderKind {
  kPerLanguage,        // one embedding table + prenet per language
  kLanguageEmbedding,  // shared encoder plus a learned language vector
};

// Every dimension of the acoustic model. Parameter shapes, and therefore
// the parameter count, are a pure function of this struct.
struct ModelConfig {
  std::size_t embedding_dim = 256;
  std::size_t prenet_layers = 3;
  std::size_t prenet_kernel = 5;  // odd
  std::size_t buffer_size = 100;
  std::size_t buffer_dim = 256;
  std::size_t speaker_dim = 256;
  std::size_t hidden_dim = 256;  // attention, update and output networks
  std::size_t recurrency_layers = 2;
  std::size_t recurrency_width = 512;
  std::size_t mel_bins = 80;
  std::size_t attention_components = 1;
  EncoderKind encoder = EncoderKind::kPerLanguage;
  // Fixed affine map applied to the fed-back frame, (x - offset) / scale.
  // Targets and outputs stay in unnormalized log-mel units.
  double input_offset = 0.0;
  double input_scale = 1.0;
  std::vector<LanguageSpec> languages;
  std::vector<std::string> speakers;
  std::uint64_t init_seed = 1;

  // Throws ValidationError naming the offending field.
  void Validate() const;

  std::string ToJson() const;
  static ModelConfig FromJson(const std::string& json);

  // Languages, phoneset sizes, speakers, mel bins and input normalization
  // (mean and standard deviation of all mel values) taken from a corpus;
  // other fields keep their values from `base`.
  static ModelConfig FromCorpus(const corpus::Corpus& corpus,
                                ModelConfig base);
  static ModelConfig FromCorpus(const corpus::Corpus& corpus) {
    return FromCorpus(corpus, ModelConfig());
  }

  int LanguageIndex(const std::string& code) const;  // -1 if absent
  int SpeakerIndex(const std::string& id) const;     // -1 if absent
};

}  // namespace polyloop::acoustic

#endif  // POLYLOOP_ACOUSTIC_MODEL_CONFIG_H_
