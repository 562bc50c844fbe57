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

#ifndef WHATIF_PDP_H_
#define WHATIF_PDP_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "whatif/dataset.h"
#include "whatif/model_registry.h"

namespace whatif {

// Curves whose ys spread (max - min) is below this are reported as flat: the
// model ignores the feature around this point.
inline constexpr double kFlatCurveTolerance = 1e-12;
inline constexpr size_t kDefaultCategoricalPdpValues = 10;

struct PdpSpec {
  std::string feature;
  // Numeric sweep range override; lo < hi.
  std::optional<std::pair<double, double>> range;
  size_t num_points = 10;
  // Categorical sweep values; default is the 10 most common values (ties in
  // lexicographic order).
  std::optional<std::vector<std::string>> categorical_values;
  // Multiclass models: number of classes plotted.
  size_t top_n_classes = 3;
};

struct PdpSeries {
  ModelSlot model = ModelSlot::kModel1;
  // Set for multiclass models.
  std::optional<int> class_index;
  std::vector<double> ys;
};

struct PdpCurve {
  std::string feature;
  FeatureKind kind = FeatureKind::kNumeric;
  // Unset for the global curve.
  std::optional<PointId> point_id;
  std::vector<Value> xs;
  std::vector<PdpSeries> series;
  // The point's own value of the feature (local curves only).
  std::optional<Value> original_value;
  // Classification threshold per binary model.
  std::vector<std::pair<ModelSlot, double>> thresholds;
};

struct PdpModel {
  const ModelHandle* handle = nullptr;
  double threshold = 0.5;
};

// Schema features for which curves are produced: everything except
// identifier-like features whose values are all distinct (only checked when
// the dataset has at least two points). Derived features are never eligible.
std::vector<std::string> EligibleFeatures(const Dataset& dataset);

// Swept values. Numeric: num_points equally spaced values over the dataset's
// observed [min, max] (or the override), endpoints included; a single value
// when the feature is constant and no range is given.
absl::StatusOr<std::vector<Value>> PdpGrid(const Dataset& dataset,
                                           const PdpSpec& spec);

// Scores of copies of one point with the feature set to each swept value.
// The dataset is not modified.
absl::StatusOr<PdpCurve> LocalPdp(const Dataset& dataset,
                                  std::span<const PdpModel> models,
                                  PointId point_id, const PdpSpec& spec);

using PdpProgress = std::function<void(size_t done, size_t total)>;

// Mean score over all points with the feature forced to each swept value.
absl::StatusOr<PdpCurve> GlobalPdp(const Dataset& dataset,
                                   std::span<const PdpModel> models,
                                   const PdpSpec& spec,
                                   const PdpProgress& progress = {});

bool IsFlat(std::span<const double> ys, double tolerance = kFlatCurveTolerance);

}  // namespace whatif

#endif  // WHATIF_PDP_H_
