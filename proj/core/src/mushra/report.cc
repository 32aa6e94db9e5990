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

#include "polyloop/mushra/report.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "polyloop/common/error.h"

namespace polyloop::mushra {

using nlohmann::json;

bool IsAnomaly(const PanelScores& record, const std::string& reference,
               int margin) {
  const auto ref = record.scores.find(reference);
  if (ref == record.scores.end()) return false;
  int above = 0;
  for (const auto& [system, score] : record.scores) {
    if (system != reference && score >= ref->second + margin) ++above;
  }
  return above == 1;
}

FilterResult FilterAnomalies(const std::vector<PanelScores>& records,
                             const std::string& reference, int margin) {
  FilterResult out;
  for (const auto& r : records) {
    (IsAnomaly(r, reference, margin) ? out.discarded : out.kept).push_back(r);
  }
  return out;
}

const SystemSummary& AnalysisReport::Summary(const std::string& system) const {
  for (const auto& s : systems) {
    if (s.system == system) return s;
  }
  throw ValidationError("report has no system '" + system + "'");
}

const PairwiseTest* AnalysisReport::Pair(const std::string& a,
                                         const std::string& b) const {
  for (const auto& p : pairs) {
    if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) return &p;
  }
  return nullptr;
}

AnalysisReport BuildReport(const std::vector<PanelScores>& records,
                           const std::vector<std::string>& systems,
                           double alpha) {
  AnalysisReport report;
  report.alpha = alpha;
  report.records = records.size();

  std::map<std::string, std::vector<double>> scores, ranks;
  for (const auto& r : records) {
    std::vector<std::string> present;
    std::vector<double> values;
    for (const auto& s : systems) {
      const auto it = r.scores.find(s);
      if (it == r.scores.end()) continue;
      present.push_back(s);
      values.push_back(it->second);
      scores[s].push_back(it->second);
    }
    const auto rk = AverageRanks(values, /*descending=*/true);
    for (std::size_t i = 0; i < present.size(); ++i) ranks[present[i]].push_back(rk[i]);
  }

  for (const auto& s : systems) {
    SystemSummary sum;
    sum.system = s;
    const auto& v = scores[s];
    sum.n = v.size();
    if (v.empty()) {
      sum.empty = true;
      sum.mean = sum.median = sum.average_rank = std::nan("");
      sum.min = sum.q1 = sum.q3 = sum.max = std::nan("");
    } else {
      double total = 0;
      for (double x : v) total += x;
      sum.mean = total / v.size();
      sum.median = Quantile(v, 0.5);
      sum.min = Quantile(v, 0);
      sum.q1 = Quantile(v, 0.25);
      sum.q3 = Quantile(v, 0.75);
      sum.max = Quantile(v, 1);
      double rtotal = 0;
      for (double x : ranks[s]) rtotal += x;
      sum.average_rank = rtotal / ranks[s].size();
    }
    report.systems.push_back(sum);
  }

  std::vector<double> family;
  std::vector<std::size_t> family_index;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    for (std::size_t j = i + 1; j < systems.size(); ++j) {
      PairwiseTest p;
      p.a = systems[i];
      p.b = systems[j];
      std::vector<double> x, y;
      for (const auto& r : records) {
        const auto ia = r.scores.find(p.a);
        const auto ib = r.scores.find(p.b);
        if (ia != r.scores.end() && ib != r.scores.end()) {
          x.push_back(ia->second);
          y.push_back(ib->second);
        }
      }
      p.pairs = x.size();
      if (x.empty()) {
        p.degenerate = true;
        p.test.degenerate = true;
      } else {
        p.test = WilcoxonSignedRank(x, y);
        p.degenerate = p.test.degenerate;
      }
      p.holm = {p.test.p_value, 1.0, false};
      if (!p.degenerate) {
        family.push_back(p.test.p_value);
        family_index.push_back(report.pairs.size());
      }
      report.pairs.push_back(p);
    }
  }
  const auto decisions = HolmBonferroni(family, alpha);
  for (std::size_t k = 0; k < decisions.size(); ++k) {
    report.pairs[family_index[k]].holm = decisions[k];
  }
  return report;
}

namespace {

std::string Fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Medians print as integers when whole.
std::string MedianText(double v) {
  if (std::isnan(v)) return "n/a";
  if (v == std::floor(v)) return Fixed(v, 0);
  return Fixed(v, 1);
}

std::string PText(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), p < 1e-4 ? "%.2e" : "%.4f", p);
  return buf;
}

}  // namespace

std::string AnalysisReport::ToText() const {
  std::ostringstream out;
  out << "records\t" << records << "\n";
  out << "discarded\t" << discarded << "\n";
  out << "alpha\t" << Fixed(alpha, 3) << "\n\n";
  out << "system\tmean\tmedian\taverage_rank\tn\n";
  for (const auto& s : systems) {
    out << s.system << '\t' << Fixed(s.mean, 2) << '\t' << MedianText(s.median)
        << '\t' << Fixed(s.average_rank, 2) << '\t' << s.n
        << (s.empty ? "\tNO RATINGS" : "") << '\n';
  }
  out << "\nsystem_a\tsystem_b\tpairs\tW\tp\tp_holm\tsignificant\n";
  for (const auto& p : pairs) {
    out << p.a << '\t' << p.b << '\t' << p.pairs << '\t';
    if (p.degenerate) {
      out << "-\t-\t-\tdegenerate\n";
      continue;
    }
    out << Fixed(p.test.statistic, 1) << '\t' << PText(p.test.p_value) << '\t'
        << PText(p.holm.adjusted) << '\t' << (p.holm.reject ? "yes" : "no")
        << '\n';
  }
  return out.str();
}

std::string AnalysisReport::ToJson() const {
  auto num = [](double v) -> json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  json j;
  j["alpha"] = alpha;
  j["records"] = records;
  j["discarded"] = discarded;
  j["systems"] = json::array();
  for (const auto& s : systems) {
    j["systems"].push_back({{"system", s.system},
                            {"n", s.n},
                            {"mean", num(s.mean)},
                            {"median", num(s.median)},
                            {"average_rank", num(s.average_rank)},
                            {"min", num(s.min)},
                            {"q1", num(s.q1)},
                            {"q3", num(s.q3)},
                            {"max", num(s.max)},
                            {"empty", s.empty}});
  }
  j["pairs"] = json::array();
  for (const auto& p : pairs) {
    json e = {{"a", p.a}, {"b", p.b}, {"pairs", p.pairs}, {"degenerate", p.degenerate}};
    if (!p.degenerate) {
      e["w_plus"] = p.test.w_plus;
      e["w_minus"] = p.test.w_minus;
      e["statistic"] = p.test.statistic;
      e["p"] = p.test.p_value;
      e["exact"] = p.test.exact;
      e["p_holm"] = p.holm.adjusted;
      e["reject"] = p.holm.reject;
    }
    j["pairs"].push_back(e);
  }
  return j.dump(2);
}

std::string AnalysisReport::BoxplotTsv() const {
  std::ostringstream out;
  out << "system\tmin\tq1\tmedian\tq3\tmax\tmean\n";
  for (const auto& s : systems) {
    out << s.system << '\t' << Fixed(s.min, 2) << '\t' << Fixed(s.q1, 2) << '\t'
        << Fixed(s.median, 2) << '\t' << Fixed(s.q3, 2) << '\t'
        << Fixed(s.max, 2) << '\t' << Fixed(s.mean, 2) << '\n';
  }
  return out.str();
}

}  // namespace polyloop::mushra
