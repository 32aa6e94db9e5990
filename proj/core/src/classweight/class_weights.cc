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

#include "polyloop/classweight/class_weights.h"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace polyloop::classweight {

ClassCounts ClassCounts::FromMap(
    const std::map<std::string, std::size_t>& counts) {
  ClassCounts out;
  for (const auto& [id, n] : counts) {
    out.classes.push_back(id);
    out.counts.push_back(n);
  }
  return out;
}

std::uint64_t ClassCounts::total() const {
  std::uint64_t c = 0;
  for (auto n : counts) c += n;
  return c;
}

void ClassCounts::Validate() const {
  if (classes.size() != counts.size()) {
    throw ValidationError("class ids and counts differ in length");
  }
  if (classes.empty()) throw ValidationError("no classes");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (counts[i] == 0) {
      throw ValidationError("class '" + classes[i] + "' has zero samples");
    }
    if (!seen.insert(classes[i]).second) {
      throw ValidationError("class '" + classes[i] + "' listed twice");
    }
  }
}

std::vector<double> ComputeRawWeights(const ClassCounts& counts) {
  counts.Validate();
  const double c = static_cast<double>(counts.total());
  const double n = static_cast<double>(counts.size());
  std::vector<double> alpha;
  alpha.reserve(counts.size());
  for (auto ci : counts.counts) {
    alpha.push_back(std::sqrt(c / (static_cast<double>(ci) * n)));
  }
  return alpha;
}

std::vector<double> NormalizeWeights(const ClassCounts& counts,
                                     std::span<const double> alpha) {
  counts.Validate();
  if (alpha.size() != counts.size()) {
    throw ValidationError("weight vector length differs from class count");
  }
  double mass = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (!(alpha[j] > 0.0)) throw ValidationError("weights must be positive");
    mass += static_cast<double>(counts.counts[j]) * alpha[j];
  }
  const double c = static_cast<double>(counts.total());
  std::vector<double> out;
  out.reserve(alpha.size());
  for (double a : alpha) out.push_back(a * c / mass);
  return out;
}

ClassWeightTable::ClassWeightTable(ClassCounts counts)
    : counts_(std::move(counts)) {
  raw_ = ComputeRawWeights(counts_);
  normalized_ = NormalizeWeights(counts_, raw_);
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    index_[counts_.classes[i]] = i;
  }
}

double ClassWeightTable::Weight(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownClassError(id);
  return normalized_[it->second];
}

std::string_view ToString(WeightingMode mode) {
  switch (mode) {
    case WeightingMode::kNone: return "none";
    case WeightingMode::kSpeaker: return "speaker";
    case WeightingMode::kSpeakerAndLanguage: return "both";
  }
  return "none";
}

WeightingMode ParseWeightingMode(std::string_view text) {
  if (text == "none") return WeightingMode::kNone;
  if (text == "speaker") return WeightingMode::kSpeaker;
  if (text == "both" || text == "speaker+language") {
    return WeightingMode::kSpeakerAndLanguage;
  }
  throw ValidationError("unknown weighting mode '" + std::string(text) + "'");
}

SampleWeighter::SampleWeighter(
    WeightingMode mode,
    const std::map<std::string, std::size_t>& speaker_counts,
    const std::map<std::string, std::size_t>& language_counts)
    : mode_(mode),
      speakers_(ClassCounts::FromMap(speaker_counts)),
      languages_(ClassCounts::FromMap(language_counts)) {}

double SampleWeighter::Weight(const std::string& speaker,
                              const std::string& language) const {
  const double ws = speakers_.Weight(speaker);
  const double wl = languages_.Weight(language);
  switch (mode_) {
    case WeightingMode::kNone: return 1.0;
    case WeightingMode::kSpeaker: return ws;
    case WeightingMode::kSpeakerAndLanguage: return ws * wl;
  }
  return 1.0;
}

std::string FormatTable(const std::string& factor,
                        const ClassWeightTable& table) {
  std::ostringstream os;
  const auto& counts = table.counts();
  os << "# factor=" << factor << " classes=" << counts.size()
     << " total=" << counts.total() << "\n";
  os << "class\tcount\traw_weight\tnormalized_weight\n";
  char buf[64];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    os << counts.classes[i] << '\t' << counts.counts[i] << '\t';
    std::snprintf(buf, sizeof(buf), "%.9f", table.raw()[i]);
    os << buf << '\t';
    std::snprintf(buf, sizeof(buf), "%.9f", table.normalized()[i]);
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace polyloop::classweight
