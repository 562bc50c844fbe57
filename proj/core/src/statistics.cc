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

#include "whatif/statistics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

#include "whatif/dataset.h"

namespace whatif {

double NonUniformity(std::span<const size_t> counts) {
  size_t total = 0;
  size_t nonempty = 0;
  for (size_t c : counts) {
    total += c;
    if (c > 0) ++nonempty;
  }
  if (nonempty <= 1) return 1.0;
  size_t first = 0;
  for (size_t c : counts) {
    if (c > 0) {
      first = c;
      break;
    }
  }
  if (std::all_of(counts.begin(), counts.end(),
                  [first](size_t c) { return c == 0 || c == first; })) {
    return 0.0;
  }
  double entropy = 0.0;
  for (size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    entropy -= p * std::log(p);
  }
  const double value = 1.0 - entropy / std::log(static_cast<double>(nonempty));
  return std::clamp(value, 0.0, 1.0);
}

size_t UniformBinIndex(double v, double lo, double hi, size_t bins) {
  if (bins <= 1 || v >= hi) return bins == 0 ? 0 : bins - 1;
  if (v <= lo) return 0;
  const double width = (hi - lo) / static_cast<double>(bins);
  size_t index = static_cast<size_t>(std::floor((v - lo) / width));
  return std::min(index, bins - 1);
}

namespace {

FeatureStatistics NumericStatistics(const Dataset& dataset, size_t f) {
  FeatureStatistics out;
  out.schema.name = dataset.features()[f].name;
  out.schema.kind = FeatureKind::kNumeric;

  std::vector<double> values;
  values.reserve(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    const Value& v = dataset.point(i).values[f];
    if (const double* d = AsNumber(v)) {
      values.push_back(*d);
      if (*d == 0.0) ++out.schema.zero_count;
    } else {
      ++out.schema.missing_count;
    }
  }
  out.count = values.size();

  NumericSummary summary;
  summary.histogram.assign(kHistogramBins, 0);
  if (!values.empty()) {
    // Welford keeps the mean exact for constant columns.
    double mean = 0.0;
    double m2 = 0.0;
    double lo = values.front();
    double hi = values.front();
    size_t k = 0;
    for (double x : values) {
      ++k;
      const double delta = x - mean;
      mean += delta / static_cast<double>(k);
      m2 += delta * (x - mean);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    summary.min = lo;
    summary.max = hi;
    summary.mean = std::clamp(mean, lo, hi);
    summary.std = std::sqrt(std::max(0.0, m2 / static_cast<double>(k)));
    for (double x : values) {
      ++summary.histogram[UniformBinIndex(x, lo, hi, kHistogramBins)];
    }
    std::sort(values.begin(), values.end());
    out.schema.distinct_count = static_cast<size_t>(
        std::unique(values.begin(), values.end()) - values.begin());
  }
  out.non_uniformity = NonUniformity(summary.histogram);
  out.numeric = std::move(summary);
  return out;
}

FeatureStatistics CategoricalStatistics(const Dataset& dataset, size_t f) {
  FeatureStatistics out;
  out.schema.name = dataset.features()[f].name;
  out.schema.kind = FeatureKind::kCategorical;

  std::map<std::string, size_t> counts;
  for (size_t i = 0; i < dataset.size(); ++i) {
    const Value& v = dataset.point(i).values[f];
    if (const std::string* s = AsString(v)) {
      ++counts[*s];
      ++out.count;
    } else {
      ++out.schema.missing_count;
    }
  }
  out.schema.distinct_count = counts.size();

  CategoricalSummary summary;
  summary.value_counts.assign(counts.begin(), counts.end());
  std::stable_sort(summary.value_counts.begin(), summary.value_counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (!summary.value_counts.empty()) {
    summary.most_frequent = summary.value_counts.front().first;
  }
  std::vector<size_t> raw;
  raw.reserve(summary.value_counts.size());
  for (const auto& [value, count] : summary.value_counts) raw.push_back(count);
  out.non_uniformity = NonUniformity(raw);
  out.categorical = std::move(summary);
  return out;
}

}  // namespace

std::vector<FeatureStatistics> ComputeFeatureStatistics(const Dataset& dataset) {
  std::vector<FeatureStatistics> stats;
  stats.reserve(dataset.num_features());
  for (size_t f = 0; f < dataset.num_features(); ++f) {
    FeatureStatistics s = dataset.features()[f].kind == FeatureKind::kNumeric
                              ? NumericStatistics(dataset, f)
                              : CategoricalStatistics(dataset, f);
    s.display_mode = s.schema.distinct_count <= kMaxHistogramDistinctValues
                         ? DisplayMode::kHistogram
                         : DisplayMode::kCdfLine;
    stats.push_back(std::move(s));
  }
  return stats;
}

std::vector<std::string> SortFeatures(std::span<const FeatureStatistics> stats,
                                      FeatureSortKey key) {
  std::vector<size_t> order(stats.size());
  std::iota(order.begin(), order.end(), 0);
  auto empties = [&](size_t i) {
    return stats[i].schema.missing_count + stats[i].schema.zero_count;
  };
  switch (key) {
    case FeatureSortKey::kNonUniformity:
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return stats[a].non_uniformity > stats[b].non_uniformity;
      });
      break;
    case FeatureSortKey::kMissingOrZeroCount:
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return empties(a) > empties(b);
      });
      break;
    case FeatureSortKey::kAlphabetical:
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return stats[a].schema.name < stats[b].schema.name;
      });
      break;
  }
  std::vector<std::string> names;
  names.reserve(order.size());
  for (size_t i : order) names.push_back(stats[i].schema.name);
  return names;
}

}  // namespace whatif
