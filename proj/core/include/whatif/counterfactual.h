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

#ifndef WHATIF_COUNTERFACTUAL_H_
#define WHATIF_COUNTERFACTUAL_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "whatif/dataset.h"
#include "whatif/model.h"
#include "whatif/model_registry.h"

namespace whatif {

enum class DistanceNorm { kL1, kL2 };

std::string_view NormName(DistanceNorm norm);
// "l1" or "l2", case-insensitive.
absl::StatusOr<DistanceNorm> ParseNorm(std::string_view text);

// Per-feature normalizers over a dataset snapshot: the population standard
// deviation of numeric features and the collision probability sum_v p_v^2 of
// categorical ones (1 when a categorical feature has no values).
struct FeatureDistanceStats {
  std::vector<FeatureKind> kinds;
  std::vector<double> scales;

  static FeatureDistanceStats Compute(const Dataset& dataset);
};

// Distance between two values of one feature:
//   numeric:      |a - b| / std, or 0 when std is 0;
//   categorical:  0 if equal, else the collision probability.
// Both missing is 0; exactly one missing is 1 (numeric) or the collision
// probability (categorical).
double FeatureDistance(FeatureKind kind, const Value& a, const Value& b,
                       double scale);

std::vector<double> PerFeatureDistances(Row a, Row b,
                                        const FeatureDistanceStats& stats);

// L1 (sum) or L2 (root of sum of squares) aggregate over the features enabled
// in `mask`. An empty mask enables every schema feature.
double DatapointDistance(Row a, Row b, DistanceNorm norm,
                         const FeatureDistanceStats& stats,
                         std::span<const bool> mask = {});

// When two predictions count as different outcomes: binary scores are
// thresholded (positive iff score >= threshold), multiclass compares argmax
// classes, and regression predictions differ when they are more than
// `regression_margin` apart (default: the population std of all predictions).
struct OutcomePolicy {
  double threshold = 0.5;
  std::optional<double> regression_margin;
};

struct FeatureDelta {
  std::string feature;
  Value anchor_value;
  Value match_value;
  double distance = 0.0;
};

struct CounterfactualResult {
  PointId anchor_id = 0;
  DistanceNorm norm = DistanceNorm::kL1;
  // Unset when every point shares the anchor's outcome.
  std::optional<PointId> match_id;
  double distance = 0.0;
  // One entry per schema feature.
  std::vector<FeatureDelta> per_feature_deltas;

  bool found() const { return match_id.has_value(); }
};

// The closest point whose outcome differs from the anchor's. `predictions`
// is aligned with the dataset's point order. Ties go to the lowest id.
absl::StatusOr<CounterfactualResult> NearestCounterfactual(
    const Dataset& dataset, std::span<const PredictionOutput> predictions,
    PointId anchor_id, DistanceNorm norm, const OutcomePolicy& policy = {});

absl::StatusOr<CounterfactualResult> NearestCounterfactual(
    const Dataset& dataset, const ModelHandle& model, PointId anchor_id,
    DistanceNorm norm, const OutcomePolicy& policy = {});

std::string DistanceFeatureName(DistanceNorm norm, PointId anchor_id);

// Appends "distance_{l1|l2}_to_{anchor}" holding every point's distance to
// the anchor (suffixed "_v2", ... on collision). Returns the final name.
absl::StatusOr<std::string> AttachDistanceFeature(Dataset& dataset,
                                                  PointId anchor_id,
                                                  DistanceNorm norm);

}  // namespace whatif

#endif  // WHATIF_COUNTERFACTUAL_H_
