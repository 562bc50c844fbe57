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

#ifndef WHATIF_PERFORMANCE_H_
#define WHATIF_PERFORMANCE_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "whatif/binning.h"
#include "whatif/dataset.h"
#include "whatif/fairness.h"
#include "whatif/metrics.h"
#include "whatif/model_registry.h"

namespace whatif {

// Which feature holds the ground truth and how to read it. Binary tasks need
// `positive_value`; multiclass tasks map values through `class_order`
// (index = class); regression reads the numeric feature directly.
struct GroundTruthBinding {
  std::string feature;
  std::optional<std::string> positive_value;
  std::vector<std::string> class_order;
};

// 1 where the label equals the positive value, else 0. A numeric label
// feature compares numerically. Missing labels are an error.
absl::StatusOr<std::vector<int>> BinaryLabels(const Dataset& dataset,
                                              const GroundTruthBinding& binding);
absl::StatusOr<std::vector<int>> ClassLabels(const Dataset& dataset,
                                             const GroundTruthBinding& binding);
absl::StatusOr<std::vector<double>> RegressionTargets(
    const Dataset& dataset, const GroundTruthBinding& binding);

// Slicing by zero, one or two features. Numeric features are bucketed into
// numeric_bin_count uniform bins, missing values get their own slice.
struct SliceSpec {
  std::vector<std::string> features;
  size_t numeric_bin_count = 10;
};

inline constexpr std::string_view kWholeDatasetSliceKey = "all";

struct Slice {
  // "sex:Male" or "sex:Male, race:White"; "all" when not slicing.
  std::string key;
  // Positions in the dataset's point order.
  std::vector<size_t> indices;
};

// Non-empty slices partitioning the dataset, in bin order.
absl::StatusOr<std::vector<Slice>> PartitionSlices(
    const Dataset& dataset, const SliceSpec& spec,
    const ModelFields& model_fields = {});

// Per-slice thresholds, or one global threshold for every slice.
struct ThresholdAssignment {
  std::optional<FairnessStrategy> strategy;
  double global_threshold = 0.5;
  std::map<std::string, double, std::less<>> per_slice;

  double ThresholdFor(std::string_view slice_key) const;
};

struct SliceMetrics {
  std::string key;
  size_t count = 0;
  // Binary classification.
  std::optional<double> threshold;
  std::optional<ConfusionMatrix> confusion;
  // Multiclass classification.
  std::optional<MulticlassConfusion> multiclass;
  // Regression.
  std::optional<RegressionMetrics> regression;

  // Accuracy for classifiers, 0 for regression.
  double accuracy() const;
};

enum class SliceSort { kCount, kAlphabetical, kAccuracy };

std::string_view SliceSortName(SliceSort sort);
// "count", "alpha" (or "alphabetical"), "accuracy".
absl::StatusOr<SliceSort> ParseSliceSort(std::string_view text);

// Count descending, key ascending or accuracy descending. Ties keep the
// partition order.
void SortSlices(std::vector<SliceMetrics>& slices, SliceSort sort);

struct FairnessSummary {
  FairnessStrategy strategy = FairnessStrategy::kSingleThreshold;
  double epsilon = kDefaultParityEpsilon;
  double achieved_disparity = 0.0;
  bool parity_met = false;
  std::optional<double> target;
};

struct ModelPerformance {
  ModelSlot slot = ModelSlot::kModel1;
  std::string display_name;
  TaskKind task;
  ThresholdAssignment assignment;
  SliceMetrics overall;
  std::vector<SliceMetrics> slices;
  std::optional<RocCurve> roc;
  std::optional<FairnessSummary> fairness;
  std::vector<std::string> warnings;
};

struct PerformanceRequest {
  GroundTruthBinding binding;
  SliceSpec slicing;
  // Explicit thresholds take precedence over any strategy. Per-slice entries
  // override the global one.
  std::optional<double> threshold;
  std::map<std::string, double, std::less<>> slice_thresholds;
  // With no strategy, setting a cost ratio picks the single cost-optimal
  // threshold; with neither, the threshold is 0.5.
  std::optional<FairnessStrategy> strategy;
  std::optional<CostRatio> cost_ratio;
  double epsilon = kDefaultParityEpsilon;
  SliceSort sort = SliceSort::kCount;
};

struct PerformanceReport {
  std::vector<std::string> slice_by;
  std::vector<ModelPerformance> models;
};

// Evaluates every model against the ground truth, slice by slice. Each model
// is optimized independently.
absl::StatusOr<PerformanceReport> ComputePerformance(
    const Dataset& dataset, std::span<const ModelHandle* const> models,
    const PerformanceRequest& request);

// Per-point fields usable for binning and coloring, named
// "<slot>.score", "<slot>.predicted" (classifiers), "<slot>.correct"
// (classifiers, with a binding) and "<slot>.error" (regression, with a
// binding).
absl::StatusOr<ModelFields> ModelDerivedFields(
    const Dataset& dataset, const ModelHandle& model,
    std::span<const PredictionOutput> predictions,
    const GroundTruthBinding* binding, double threshold = 0.5);

}  // namespace whatif

#endif  // WHATIF_PERFORMANCE_H_
