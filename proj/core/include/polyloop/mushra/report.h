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

#ifndef POLYLOOP_MUSHRA_REPORT_H_
#define POLYLOOP_MUSHRA_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "polyloop/mushra/design.h"
#include "polyloop/mushra/stats.h"

namespace polyloop::mushra {

struct FilterResult {
  std::vector<PanelScores> kept;
  std::vector<PanelScores> discarded;
};

// Discards a record iff exactly one non-reference system scores at least
// `margin` points above the reference. Records without a reference score
// are kept untouched.
bool IsAnomaly(const PanelScores& record, const std::string& reference,
               int margin = kDefaultAnomalyMargin);
FilterResult FilterAnomalies(const std::vector<PanelScores>& records,
                             const std::string& reference,
                             int margin = kDefaultAnomalyMargin);

struct SystemSummary {
  std::string system;
  std::size_t n = 0;  // ratings
  double mean = 0;
  double median = 0;
  double average_rank = 0;  // 1 = best within a panel
  // Boxplot data.
  double min = 0, q1 = 0, q3 = 0, max = 0;
  bool empty = false;  // no ratings at all
};

struct PairwiseTest {
  std::string a, b;
  std::size_t pairs = 0;
  WilcoxonResult test;
  HolmDecision holm;
  bool degenerate = false;  // fewer than one usable pair or no differences
};

struct AnalysisReport {
  double alpha = 0.05;
  std::size_t records = 0;
  std::size_t discarded = 0;
  std::vector<SystemSummary> systems;  // in the order given
  std::vector<PairwiseTest> pairs;     // (i, j), i < j

  const SystemSummary& Summary(const std::string& system) const;
  const PairwiseTest* Pair(const std::string& a, const std::string& b) const;

  // Table with columns system / mean / median / average rank, then the
  // pairwise tests.
  std::string ToText() const;
  std::string ToJson() const;
  // Tab-separated per-system quartiles, mean and median.
  std::string BoxplotTsv() const;
};

// Pairwise tests use records that rated both systems, paired per record.
// Holm-Bonferroni runs over every non-degenerate pair.
AnalysisReport BuildReport(const std::vector<PanelScores>& records,
                           const std::vector<std::string>& systems,
                           double alpha = 0.05);

}  // namespace polyloop::mushra

#endif  // POLYLOOP_MUSHRA_REPORT_H_
