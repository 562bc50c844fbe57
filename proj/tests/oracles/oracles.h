// Copyright 2026 The WhatIf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Brute-force reference implementations used by the tests. They are written
// independently of the library: plain loops, no shared helpers.

#ifndef WHATIF_TESTS_ORACLES_ORACLES_H_
#define WHATIF_TESTS_ORACLES_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace whatif::oracle {

struct Counts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
  double accuracy() const {
    return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / total();
  }
  double positive_rate() const {
    return total() == 0 ? 0.0 : static_cast<double>(tp + fp) / total();
  }
  double tpr() const {
    return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  }
};

inline Counts CountAt(const std::vector<double>& scores,
                      const std::vector<int>& labels, double t) {
  Counts c;
  for (size_t i = 0; i < scores.size(); ++i) {
    const bool pos = scores[i] >= t;
    if (labels[i] == 1) {
      if (pos) c.tp++; else c.fn++;
    } else {
      if (pos) c.fp++; else c.tn++;
    }
  }
  return c;
}

// 0, midpoints of consecutive distinct scores, 1.
inline std::vector<double> Candidates(const std::vector<double>& scores) {
  std::set<double> distinct(scores.begin(), scores.end());
  std::vector<double> s(distinct.begin(), distinct.end());
  std::vector<double> out = {0.0};
  for (size_t i = 0; i + 1 < s.size(); ++i) out.push_back((s[i] + s[i + 1]) / 2);
  out.push_back(1.0);
  return out;
}

inline double MaxAccuracy(const std::vector<double>& scores,
                          const std::vector<int>& labels) {
  double best = -1;
  for (double t : Candidates(scores)) {
    best = std::max(best, CountAt(scores, labels, t).accuracy());
  }
  return best;
}

// Smallest candidate minimizing r * FP + FN.
inline double CheapestThreshold(const std::vector<double>& scores,
                                const std::vector<int>& labels, double r) {
  double best_t = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (double t : Candidates(scores)) {
    const Counts c = CountAt(scores, labels, t);
    const double cost = r * c.fp + c.fn;
    if (cost < best_cost) {
      best_cost = cost;
      best_t = t;
    }
  }
  return best_t;
}

// Probability that a random positive outscores a random negative, ties
// counting one half.
inline double MannWhitneyAuc(const std::vector<double>& scores,
                             const std::vector<int>& labels) {
  double wins = 0;
  long pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline double PopulationStd(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / v.size());
}

// A mixed-kind table for distance oracles. Cells hold a double, a string or
// nothing (missing).
using Cell = std::variant<std::monostate, double, std::string>;

struct Table {
  std::vector<bool> numeric;
  std::vector<std::vector<Cell>> rows;
};

struct Scales {
  std::vector<double> s;
};

inline Scales ComputeScales(const Table& t) {
  Scales out;
  for (size_t f = 0; f < t.numeric.size(); ++f) {
    if (t.numeric[f]) {
      std::vector<double> v;
      for (const auto& r : t.rows) {
        if (auto* d = std::get_if<double>(&r[f])) v.push_back(*d);
      }
      out.s.push_back(v.empty() ? 0.0 : PopulationStd(v));
    } else {
      std::map<std::string, double> freq;
      double n = 0;
      for (const auto& r : t.rows) {
        if (auto* s = std::get_if<std::string>(&r[f])) {
          freq[*s] += 1;
          n += 1;
        }
      }
      double p2 = 0;
      for (const auto& [k, c] : freq) p2 += (c / n) * (c / n);
      out.s.push_back(n == 0 ? 1.0 : p2);
    }
  }
  return out;
}

inline double CellDistance(bool numeric, const Cell& a, const Cell& b,
                           double scale) {
  const bool am = std::holds_alternative<std::monostate>(a);
  const bool bm = std::holds_alternative<std::monostate>(b);
  if (am && bm) return 0;
  if (numeric) {
    if (scale == 0) return 0;
    if (am || bm) return 1.0;
    return std::fabs(std::get<double>(a) - std::get<double>(b)) / scale;
  }
  if (am || bm) return scale;
  return std::get<std::string>(a) == std::get<std::string>(b) ? 0 : scale;
}

inline double RowDistance(const Table& t, const Scales& sc, size_t i, size_t j,
                          bool l2) {
  double sum = 0;
  for (size_t f = 0; f < t.numeric.size(); ++f) {
    const double d = CellDistance(t.numeric[f], t.rows[i][f], t.rows[j][f], sc.s[f]);
    sum += l2 ? d * d : d;
  }
  return l2 ? std::sqrt(sum) : sum;
}

// Index of the nearest row whose class differs from the anchor's, lowest
// index first on ties.
inline std::optional<size_t> NearestDifferent(const Table& t,
                                              const std::vector<int>& classes,
                                              size_t anchor, bool l2) {
  const Scales sc = ComputeScales(t);
  std::optional<size_t> best;
  double best_d = 0;
  for (size_t j = 0; j < t.rows.size(); ++j) {
    if (classes[j] == classes[anchor]) continue;
    const double d = RowDistance(t, sc, anchor, j, l2);
    if (!best || d < best_d) {
      best = j;
      best_d = d;
    }
  }
  return best;
}

// Smallest |q(a) - q(b)| over every pair of candidate thresholds of two
// slices.
inline double ProductSpaceMinDisparity(
    const std::vector<double>& s1, const std::vector<int>& l1,
    const std::vector<double>& s2, const std::vector<int>& l2,
    const std::function<double(const Counts&)>& quantity) {
  std::vector<double> q1;
  std::vector<double> q2;
  for (double t : Candidates(s1)) q1.push_back(quantity(CountAt(s1, l1, t)));
  for (double t : Candidates(s2)) q2.push_back(quantity(CountAt(s2, l2, t)));
  double best = std::numeric_limits<double>::infinity();
  for (double a : q1) {
    for (double b : q2) best = std::min(best, std::fabs(a - b));
  }
  return best;
}

}  // namespace whatif::oracle

#endif  // WHATIF_TESTS_ORACLES_ORACLES_H_
