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

#ifndef POLYLOOP_MUSHRA_DESIGN_H_
#define POLYLOOP_MUSHRA_DESIGN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "polyloop/common/error.h"

namespace polyloop::mushra {

class MissingAudioError : public IoError {
 public:
  explicit MissingAudioError(const std::filesystem::path& path)
      : IoError("missing audio file " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline constexpr std::size_t kDefaultTestSets = 3;
inline constexpr std::size_t kDefaultPanelsPerSet = 10;
inline constexpr int kDefaultAnomalyMargin = 10;

// One listening experiment. Audio for system S and sentence X lives at
// audio_root/S/X.wav.
struct MushraDesign {
  std::string name;
  std::vector<std::string> systems;  // rated models, excluding resynthesis
  std::string reference = "resynthesis";
  std::vector<std::vector<std::string>> test_sets;  // sentence ids
  std::filesystem::path audio_root;

  // Every rated stimulus in a panel: the systems plus the hidden reference.
  std::size_t stimuli_per_panel() const { return systems.size() + 1; }

  std::filesystem::path AudioPath(const std::string& system,
                                  const std::string& sentence) const;

  // Systems distinct and not equal to the reference, sets non-empty and
  // disjoint. With check_audio, every audio file must exist.
  void Validate(bool check_audio) const;

  std::string ToJson() const;
  // Relative audio_root values are resolved against `base_dir`.
  static MushraDesign FromJson(const std::string& json,
                               const std::filesystem::path& base_dir = {});
  static MushraDesign Load(const std::filesystem::path& path);
};

// Splits sentences in order into `sets` disjoint test sets of
// `panels_per_set` each. Throws if there are too few sentences.
std::vector<std::vector<std::string>> SplitTestSets(
    const std::vector<std::string>& sentences,
    std::size_t sets = kDefaultTestSets,
    std::size_t panels_per_set = kDefaultPanelsPerSet);

struct Stimulus {
  std::string id;      // opaque, safe to show to raters
  std::string system;  // never sent to the rater
  std::filesystem::path audio;
  int initial_value = 0;  // slider start, 0..100
};

struct MushraPanel {
  std::string id;
  std::string sentence;
  std::filesystem::path reference_audio;  // the visible reference
  std::vector<Stimulus> stimuli;          // presentation order

  const Stimulus* FindStimulus(const std::string& id) const;
};

// Panels of one test set for one participant. Panel order, stimulus order,
// stimulus ids and slider starts come from a generator seeded by
// (seed, participant). Throws MissingAudioError when check_audio is set
// and a file is absent.
std::vector<MushraPanel> GeneratePanels(const MushraDesign& design,
                                        const std::string& participant,
                                        std::size_t test_set,
                                        std::uint64_t seed,
                                        bool check_audio = true);

// What a participant submits for one panel.
struct RatingRecord {
  std::string participant;
  std::string panel;
  std::map<std::string, int> scores;  // stimulus id -> 0..100
  bool all_listened = false;
  bool all_moved = false;
  std::string timestamp;
};

// A rating resolved to system names, the unit of analysis.
struct PanelScores {
  std::string participant;
  std::string panel;
  std::map<std::string, double> scores;  // system -> score
};

}  // namespace polyloop::mushra

#endif  // POLYLOOP_MUSHRA_DESIGN_H_
