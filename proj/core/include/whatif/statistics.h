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

#ifndef WHATIF_STATISTICS_H_
#define WHATIF_STATISTICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "whatif/value.h"

namespace whatif {

class Dataset;

inline constexpr size_t kHistogramBins = 10;
// Features with at most this many distinct values are charted as histograms;
// the rest as cumulative distribution lines.
inline constexpr size_t kMaxHistogramDistinctValues = 20;

struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  size_t distinct_count = 0;
  size_t missing_count = 0;
  // Always 0 for categorical features.
  size_t zero_count = 0;
};

enum class DisplayMode { kHistogram, kCdfLine };

struct NumericSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  // Population standard deviation (divisor n).
  double std = 0.0;
  // kHistogramBins equal-width bins over [min, max]; the maximum lands in the
  // last bin.
  std::vector<size_t> histogram;
};

struct CategoricalSummary {
  // Sorted by count descending, then value ascending.
  std::vector<std::pair<std::string, size_t>> value_counts;
  std::string most_frequent;
};

struct FeatureStatistics {
  FeatureSchema schema;
  // Number of non-missing values.
  size_t count = 0;
  std::optional<NumericSummary> numeric;
  std::optional<CategoricalSummary> categorical;
  // 1 - H(p) / log(k) over the histogram bins (numeric) or the value
  // distribution (categorical), where k counts non-empty bins/values.
  // Defined as 1 when k <= 1.
  double non_uniformity = 1.0;
  DisplayMode display_mode = DisplayMode::kHistogram;
};

// Computes per-feature statistics for the dataset's schema features, in
// schema order. Missing values are excluded from all numeric aggregates.
std::vector<FeatureStatistics> ComputeFeatureStatistics(const Dataset& dataset);

// Normalized-entropy non-uniformity of a count distribution. Zero counts are
// ignored.
double NonUniformity(std::span<const size_t> counts);

// Bin index of `v` among `bins` uniform-width bins over [lo, hi]. Bins are
// half-open [lo_i, hi_i) except the last, which also holds `hi`. Values
// outside the range are clamped to the first/last bin.
size_t UniformBinIndex(double v, double lo, double hi, size_t bins);

enum class FeatureSortKey { kNonUniformity, kMissingOrZeroCount, kAlphabetical };

// Orders feature names. NonUniformity and MissingOrZeroCount sort descending,
// Alphabetical ascending; ties keep the input (schema) order.
std::vector<std::string> SortFeatures(std::span<const FeatureStatistics> stats,
                                      FeatureSortKey key);

}  // namespace whatif

#endif  // WHATIF_STATISTICS_H_
