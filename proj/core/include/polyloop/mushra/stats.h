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

#ifndef POLYLOOP_MUSHRA_STATS_H_
#define POLYLOOP_MUSHRA_STATS_H_

#include <span>
#include <vector>

namespace polyloop::mushra {

enum class WilcoxonMethod { kAuto, kExact, kNormal };

// Largest sample size for which kAuto uses the exact distribution.
inline constexpr std::size_t kExactWilcoxonLimit = 25;

struct WilcoxonResult {
  double w_plus = 0;     // rank sum of positive differences
  double w_minus = 0;    // rank sum of negative differences
  double statistic = 0;  // min(w_plus, w_minus)
  double p_value = 1;    // two-sided
  std::size_t n = 0;     // nonzero differences
  bool exact = false;
  bool degenerate = false;  // no nonzero differences
};

// Signed-rank test on x - y. Zero differences are dropped, tied absolute
// differences share their average rank. The exact p-value counts sign
// assignments of the observed ranks (ties included); the normal
// approximation uses tie and continuity corrections. Throws
// ValidationError when the inputs are empty or of unequal length.
WilcoxonResult WilcoxonSignedRank(std::span<const double> x,
                                  std::span<const double> y,
                                  WilcoxonMethod method = WilcoxonMethod::kAuto);

struct HolmDecision {
  double p_value = 0;
  double adjusted = 0;
  bool reject = false;
};

// Step-down Holm-Bonferroni; results in input order. Throws
// ValidationError for p-values outside [0, 1].
std::vector<HolmDecision> HolmBonferroni(std::span<const double> p_values,
                                         double alpha);

// Average ranks (1-based) of `values`, ties sharing the mean rank. With
// `descending`, the largest value gets rank 1.
std::vector<double> AverageRanks(std::span<const double> values,
                                 bool descending = false);

// Linear-interpolation quantile of unsorted data, q in [0, 1].
double Quantile(std::vector<double> values, double q);

}  // namespace polyloop::mushra

#endif  // POLYLOOP_MUSHRA_STATS_H_
