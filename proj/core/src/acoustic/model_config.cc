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

#include "polyloop/acoustic/model_config.h"

#include <cmath>
#include <set>

#include "json.hpp"

namespace polyloop::acoustic {

using nlohmann::json;

void ModelConfig::Validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ValidationError(std::string("model config: ") + name +
                                      " must be positive");
  };
  positive(embedding_dim, "embedding_dim");
  positive(prenet_layers, "prenet_layers");
  positive(prenet_kernel, "prenet_kernel");
  positive(buffer_size, "buffer_size");
  positive(buffer_dim, "buffer_dim");
  positive(speaker_dim, "speaker_dim");
  positive(hidden_dim, "hidden_dim");
  positive(recurrency_layers, "recurrency_layers");
  positive(recurrency_width, "recurrency_width");
  positive(mel_bins, "mel_bins");
  positive(attention_components, "attention_components");
  if (!(input_scale > 0) || !std::isfinite(input_offset)) {
    throw ValidationError("model config: input_scale must be positive");
  }
  if (prenet_kernel % 2 == 0) {
    throw ValidationError("model config: prenet_kernel must be odd");
  }
  if (languages.empty()) throw ValidationError("model config: no languages");
  if (speakers.empty()) throw ValidationError("model config: no speakers");
  std::set<std::string> seen;
  for (const auto& l : languages) {
    if (l.code.empty() || !seen.insert(l.code).second) {
      throw ValidationError("model config: empty or duplicate language '" +
                            l.code + "'");
    }
    if (l.phonemes == 0) {
      throw ValidationError("model config: language '" + l.code +
                            "' has an empty phoneset");
    }
  }
  seen.clear();
  for (const auto& s : speakers) {
    if (s.empty() || !seen.insert(s).second) {
      throw ValidationError("model config: empty or duplicate speaker '" + s +
                            "'");
    }
  }
}

std::string ModelConfig::ToJson() const {
  json j;
  j["embedding_dim"] = embedding_dim;
  j["prenet_layers"] = prenet_layers;
  j["prenet_kernel"] = prenet_kernel;
  j["buffer_size"] = buffer_size;
  j["buffer_dim"] = buffer_dim;
  j["speaker_dim"] = speaker_dim;
  j["hidden_dim"] = hidden_dim;
  j["recurrency_layers"] = recurrency_layers;
  j["recurrency_width"] = recurrency_width;
  j["mel_bins"] = mel_bins;
  j["attention_components"] = attention_components;
  j["encoder"] = encoder == EncoderKind::kPerLanguage ? "per_language"
                                                      : "language_embedding";
  j["languages"] = json::array();
  for (const auto& l : languages) {
    j["languages"].push_back({{"code", l.code}, {"phonemes", l.phonemes}});
  }
  j["speakers"] = speakers;
  j["input_offset"] = input_offset;
  j["input_scale"] = input_scale;
  j["init_seed"] = init_seed;
  return j.dump(2);
}

ModelConfig ModelConfig::FromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("model config: ") + e.what());
  }
  ModelConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("embedding_dim", c.embedding_dim);
    get("prenet_layers", c.prenet_layers);
    get("prenet_kernel", c.prenet_kernel);
    get("buffer_size", c.buffer_size);
    get("buffer_dim", c.buffer_dim);
    get("speaker_dim", c.speaker_dim);
    get("hidden_dim", c.hidden_dim);
    get("recurrency_layers", c.recurrency_layers);
    get("recurrency_width", c.recurrency_width);
    get("mel_bins", c.mel_bins);
    get("attention_components", c.attention_components);
    get("init_seed", c.init_seed);
    get("input_offset", c.input_offset);
    get("input_scale", c.input_scale);
    if (j.contains("encoder")) {
      const auto kind = j.at("encoder").get<std::string>();
      if (kind == "per_language") {
        c.encoder = EncoderKind::kPerLanguage;
      } else if (kind == "language_embedding") {
        c.encoder = EncoderKind::kLanguageEmbedding;
      } else {
        throw ValidationError("model config: unknown encoder '" + kind + "'");
      }
    }
    if (j.contains("languages")) {
      for (const auto& l : j.at("languages")) {
        c.languages.push_back(
            {l.at("code").get<std::string>(), l.at("phonemes").get<std::size_t>()});
      }
    }
    get("speakers", c.speakers);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model config: ") + e.what());
  }
  return c;
}

ModelConfig ModelConfig::FromCorpus(const corpus::Corpus& corpus,
                                    ModelConfig base) {
  base.languages.clear();
  for (const auto& [code, ps] : corpus.phonesets) {
    base.languages.push_back({code, ps.size()});
  }
  std::set<std::string> speakers;
  for (const auto& u : corpus.utterances) speakers.insert(u->speaker);
  base.speakers.assign(speakers.begin(), speakers.end());
  if (corpus.mel_bins) base.mel_bins = corpus.mel_bins;
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (const auto& u : corpus.utterances) {
    for (float v : u->mel.values()) {
      sum += v;
      sq += static_cast<double>(v) * v;
      ++n;
    }
  }
  if (n > 0) {
    base.input_offset = sum / n;
    const double var = sq / n - base.input_offset * base.input_offset;
    base.input_scale = var > 1e-12 ? std::sqrt(var) : 1.0;
  }
  return base;
}

int ModelConfig::LanguageIndex(const std::string& code) const {
  for (std::size_t i = 0; i < languages.size(); ++i) {
    if (languages[i].code == code) return static_cast<int>(i);
  }
  return -1;
}

int ModelConfig::SpeakerIndex(const std::string& id) const {
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    if (speakers[i] == id) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace polyloop::acoustic
