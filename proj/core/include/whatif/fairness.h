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

#ifndef WHATIF_FAIRNESS_H_
#define WHATIF_FAIRNESS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "whatif/metrics.h"

namespace whatif {

enum class FairnessStrategy {
  kSingleThreshold,
  kGroupThresholds,
  kDemographicParity,
  kEqualOpportunity,
  kEqualAccuracy,
};

// "single", "group", "demographic-parity", "equal-opportunity",
// "equal-accuracy".
std::string_view StrategyName(FairnessStrategy strategy);
absl::StatusOr<FairnessStrategy> ParseStrategy(std::string_view text);

inline constexpr double kDefaultParityEpsilon = 0.01;
// The parity target is scanned over i / kTargetScanSteps for i in
// [0, kTargetScanSteps].
inline constexpr int kTargetScanSteps = 1000;

// The per-slice quantity a strategy equalizes. Demographic parity: positive
// prediction rate. Equal opportunity: true-positive rate among ground-truth
// positives (0 for a slice without positives). Equal accuracy: accuracy.
// Single and group thresholds are reported by positive rate.
double ParityQuantity(FairnessStrategy strategy, const ConfusionMatrix& m);

struct SliceScores {
  std::string key;
  std::vector<double> scores;
  std::vector<int> labels;
};

struct SliceThreshold {
  std::string key;
  double threshold = 0.5;
  ConfusionMatrix confusion;
  // ParityQuantity at the chosen threshold.
  double quantity = 0.0;
};

struct GroupThresholdResult {
  FairnessStrategy strategy = FairnessStrategy::kSingleThreshold;
  // Set for the single-threshold strategy.
  std::optional<double> global_threshold;
  // Input order.
  std::vector<SliceThreshold> slices;
  // max - min of the slices' quantities.
  double achieved_disparity = 0.0;
  double total_cost = 0.0;
  // Parity target of the scanning strategies.
  std::optional<double> target;
};

// Chooses thresholds for binary-classifier slices.
//
//   single: one cost-optimal threshold over the pooled slices.
//   group: each slice's own cost-optimal threshold.
//   parity strategies: for each target t on the scan grid, every slice takes
//     the candidate threshold whose quantity is nearest t (ties: lower slice
//     cost, then lower threshold). The target with the smallest max - min
//     disparity wins, ties going to lower total cost.
//
// Group strategies need at least two slices.
absl::StatusOr<GroupThresholdResult> OptimizeGroupThresholds(
    std::span<const SliceScores> slices, FairnessStrategy strategy,
    CostRatio cost_ratio = {});

}  // namespace whatif

#endif  // WHATIF_FAIRNESS_H_
