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

#include "polyloop/mushra/design.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "polyloop/common/random.h"

namespace polyloop::mushra {

using nlohmann::json;

std::filesystem::path MushraDesign::AudioPath(const std::string& system,
                                              const std::string& sentence) const {
  return audio_root / system / (sentence + ".wav");
}

void MushraDesign::Validate(bool check_audio) const {
  if (systems.empty()) throw ValidationError("design: no systems");
  if (reference.empty()) throw ValidationError("design: no reference system");
  std::set<std::string> seen;
  for (const auto& s : systems) {
    if (s.empty() || s == reference || !seen.insert(s).second) {
      throw ValidationError("design: bad or repeated system '" + s + "'");
    }
  }
  if (test_sets.empty()) throw ValidationError("design: no test sets");
  std::set<std::string> sentences;
  for (std::size_t i = 0; i < test_sets.size(); ++i) {
    if (test_sets[i].empty()) {
      throw ValidationError("design: test set " + std::to_string(i + 1) + " is empty");
    }
    for (const auto& sentence : test_sets[i]) {
      if (!sentences.insert(sentence).second) {
        throw ValidationError("design: sentence '" + sentence +
                              "' appears in more than one panel");
      }
    }
  }
  if (check_audio) {
    for (const auto& sentence : sentences) {
      for (const auto& s : systems) {
        if (!std::filesystem::exists(AudioPath(s, sentence))) {
          throw MissingAudioError(AudioPath(s, sentence));
        }
      }
      if (!std::filesystem::exists(AudioPath(reference, sentence))) {
        throw MissingAudioError(AudioPath(reference, sentence));
      }
    }
  }
}

std::string MushraDesign::ToJson() const {
  return json{{"name", name},
              {"systems", systems},
              {"reference", reference},
              {"test_sets", test_sets},
              {"audio_root", audio_root.string()}}
      .dump(2);
}

MushraDesign MushraDesign::FromJson(const std::string& text,
                                    const std::filesystem::path& base_dir) {
  MushraDesign d;
  try {
    const json j = json::parse(text);
    d.name = j.value("name", std::string());
    d.systems = j.at("systems").get<std::vector<std::string>>();
    d.reference = j.value("reference", d.reference);
    d.test_sets = j.at("test_sets").get<std::vector<std::vector<std::string>>>();
    d.audio_root = j.value("audio_root", std::string("."));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("design: ") + e.what());
  }
  if (d.audio_root.is_relative() && !base_dir.empty()) {
    d.audio_root = base_dir / d.audio_root;
  }
  return d;
}

MushraDesign MushraDesign::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return FromJson(s.str(), path.parent_path());
}

std::vector<std::vector<std::string>> SplitTestSets(
    const std::vector<std::string>& sentences, std::size_t sets,
    std::size_t panels_per_set) {
  if (sets == 0 || panels_per_set == 0) {
    throw ValidationError("test sets: counts must be positive");
  }
  if (sentences.size() < sets * panels_per_set) {
    throw ValidationError("test sets: need " + std::to_string(sets * panels_per_set) +
                          " sentences, have " + std::to_string(sentences.size()));
  }
  std::vector<std::vector<std::string>> out(sets);
  for (std::size_t s = 0; s < sets; ++s) {
    out[s].assign(sentences.begin() + s * panels_per_set,
                  sentences.begin() + (s + 1) * panels_per_set);
  }
  return out;
}

const Stimulus* MushraPanel::FindStimulus(const std::string& id) const {
  for (const auto& s : stimuli) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<MushraPanel> GeneratePanels(const MushraDesign& design,
                                        const std::string& participant,
                                        std::size_t test_set, std::uint64_t seed,
                                        bool check_audio) {
  design.Validate(false);
  if (test_set >= design.test_sets.size()) {
    throw ValidationError("design has no test set " + std::to_string(test_set + 1));
  }
  const std::uint64_t key = MixSeed(seed, participant);
  Rng rng(key);
  std::vector<std::string> sentences = design.test_sets[test_set];
  rng.Shuffle(sentences);

  std::vector<MushraPanel> panels;
  for (const auto& sentence : sentences) {
    MushraPanel panel;
    panel.id = "set" + std::to_string(test_set + 1) + "/" + sentence;
    panel.sentence = sentence;
    panel.reference_audio = design.AudioPath(design.reference, sentence);
    if (check_audio && !std::filesystem::exists(panel.reference_audio)) {
      throw MissingAudioError(panel.reference_audio);
    }
    std::vector<std::string> systems = design.systems;
    systems.push_back(design.reference);  // hidden reference
    rng.Shuffle(systems);
    for (const auto& system : systems) {
      Stimulus s;
      s.system = system;
      s.audio = design.AudioPath(system, sentence);
      if (check_audio && !std::filesystem::exists(s.audio)) {
        throw MissingAudioError(s.audio);
      }
      // Opaque id: a hash that reveals neither system nor position.
      char buf[20];
      std::snprintf(buf, sizeof(buf), "s%012llx",
                    static_cast<unsigned long long>(
                        MixSeed(key, panel.id + "\t" + system) & 0xffffffffffffULL));
      s.id = buf;
      s.initial_value = rng.IntInRange(0, 100);
      panel.stimuli.push_back(std::move(s));
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

}  // namespace polyloop::mushra
