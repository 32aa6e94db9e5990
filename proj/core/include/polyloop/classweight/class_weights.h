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

#ifndef POLYLOOP_CLASSWEIGHT_CLASS_WEIGHTS_H_
#define POLYLOOP_CLASSWEIGHT_CLASS_WEIGHTS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polyloop/common/error.h"

namespace polyloop::classweight {

// Sample counts per class (speakers, languages, ...), in a fixed order.
struct ClassCounts {
  std::vector<std::string> classes;
  std::vector<std::uint64_t> counts;

  static ClassCounts FromMap(const std::map<std::string, std::size_t>& counts);

  std::size_t size() const { return classes.size(); }
  std::uint64_t total() const;
  // Throws ValidationError on an empty table, a zero count, a duplicate
  // class or mismatched vector lengths.
  void Validate() const;
};

// alpha_i = sqrt(c / (c_i * N)).
std::vector<double> ComputeRawWeights(const ClassCounts& counts);

// n_alpha_i = alpha_i * c / sum_j(c_j * alpha_j), so that
// sum_i(c_i * n_alpha_i) == c.
std::vector<double> NormalizeWeights(const ClassCounts& counts,
                                     std::span<const double> alpha);

class UnknownClassError : public ValidationError {
 public:
  explicit UnknownClassError(const std::string& id)
      : ValidationError("unknown class '" + id + "'") {}
};

class ClassWeightTable {
 public:
  explicit ClassWeightTable(ClassCounts counts);

  const ClassCounts& counts() const { return counts_; }
  const std::vector<double>& raw() const { return raw_; }
  const std::vector<double>& normalized() const { return normalized_; }

  bool Contains(const std::string& id) const { return index_.count(id) != 0; }
  double Weight(const std::string& id) const;  // normalized

 private:
  ClassCounts counts_;
  std::vector<double> raw_;
  std::vector<double> normalized_;
  std::map<std::string, std::size_t> index_;
};

enum class WeightingMode {
  kNone,                // every sample weighs 1
  kSpeaker,             // monolingual multi-speaker models
  kSpeakerAndLanguage,  // multilingual models: product of both tables
};

std::string_view ToString(WeightingMode mode);
WeightingMode ParseWeightingMode(std::string_view text);

// Per-sample loss weights for a training set, built once from its counts.
class SampleWeighter {
 public:
  SampleWeighter(WeightingMode mode,
                 const std::map<std::string, std::size_t>& speaker_counts,
                 const std::map<std::string, std::size_t>& language_counts);

  WeightingMode mode() const { return mode_; }
  const ClassWeightTable& speakers() const { return speakers_; }
  const ClassWeightTable& languages() const { return languages_; }

  // Throws UnknownClassError for unseen ids (also in kNone mode).
  double Weight(const std::string& speaker, const std::string& language) const;

 private:
  WeightingMode mode_;
  ClassWeightTable speakers_;
  ClassWeightTable languages_;
};

// Structured-text rendering used by the `weights` command: one line per
// class with count, raw and normalized weight.
std::string FormatTable(const std::string& factor,
                        const ClassWeightTable& table);

}  // namespace polyloop::classweight

#endif  // POLYLOOP_CLASSWEIGHT_CLASS_WEIGHTS_H_
