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

#include "polyloop/mushra/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polyloop/common/error.h"

namespace polyloop::mushra {

std::vector<double> AverageRanks(std::span<const double> values,
                                 bool descending) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of empty data");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

// P(T <= t) and P(T >= t) for T = sum of a random subset of `ranks`, each
// included with probability 1/2. Ranks are multiples of 0.5, so the
// distribution is tabulated over doubled ranks.
std::pair<double, double> ExactTails(const std::vector<double>& ranks, double t) {
  std::vector<int> doubled;
  int total = 0;
  for (double r : ranks) {
    doubled.push_back(static_cast<int>(std::lround(2 * r)));
    total += doubled.back();
  }
  std::vector<double> count(total + 1, 0.0);
  count[0] = 1;
  int reach = 0;
  for (int r : doubled) {
    for (int s = reach; s >= 0; --s) {
      if (count[s] != 0) count[s + r] += count[s];
    }
    reach += r;
  }
  const int target = static_cast<int>(std::lround(2 * t));
  double below = 0, above = 0, all = 0;
  for (int s = 0; s <= total; ++s) {
    all += count[s];
    if (s <= target) below += count[s];
    if (s >= target) above += count[s];
  }
  return {below / all, above / all};
}

}  // namespace

WilcoxonResult WilcoxonSignedRank(std::span<const double> x,
                                  std::span<const double> y,
                                  WilcoxonMethod method) {
  if (x.size() != y.size() || x.empty()) {
    throw ValidationError("wilcoxon: need two non-empty samples of equal length");
  }
  std::vector<double> diff, absdiff;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0) {
      diff.push_back(d);
      absdiff.push_back(std::abs(d));
    }
  }
  WilcoxonResult r;
  r.n = diff.size();
  if (r.n == 0) {
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }
  const auto ranks = AverageRanks(absdiff);
  for (std::size_t i = 0; i < diff.size(); ++i) {
    (diff[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
  }
  r.statistic = std::min(r.w_plus, r.w_minus);

  const bool exact = method == WilcoxonMethod::kExact ||
                     (method == WilcoxonMethod::kAuto && r.n <= kExactWilcoxonLimit);
  if (exact) {
    const auto [below, above] = ExactTails(ranks, r.w_plus);
    r.p_value = std::min(1.0, 2 * std::min(below, above));
    r.exact = true;
    return r;
  }

  const double n = static_cast<double>(r.n);
  const double mean = n * (n + 1) / 4;
  double var = n * (n + 1) * (2 * n + 1) / 24;
  std::vector<double> sorted = absdiff;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    var -= (t * t * t - t) / 48;
    i = j;
  }
  if (var <= 0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = (std::abs(r.w_plus - mean) - 0.5) / std::sqrt(var);
  r.p_value = z <= 0 ? 1.0 : std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

std::vector<HolmDecision> HolmBonferroni(std::span<const double> p_values,
                                         double alpha) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0 && p <= 1)) throw ValidationError("holm: p-value outside [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<HolmDecision> out(m);
  bool still_rejecting = true;
  double running = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = order[k];
    const double factor = static_cast<double>(m - k);
    out[i].p_value = p_values[i];
    running = std::max(running, std::min(1.0, factor * p_values[i]));
    out[i].adjusted = running;
    still_rejecting = still_rejecting && p_values[i] <= alpha / factor;
    out[i].reject = still_rejecting;
  }
  return out;
}

}  // namespace polyloop::mushra
