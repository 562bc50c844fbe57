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

#include "whatif/counterfactual.h"

#include <cmath>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace whatif {

std::string_view NormName(DistanceNorm norm) {
  return norm == DistanceNorm::kL1 ? "l1" : "l2";
}

absl::StatusOr<DistanceNorm> ParseNorm(std::string_view text) {
  const std::string lower = absl::AsciiStrToLower(std::string(text));
  if (lower == "l1") return DistanceNorm::kL1;
  if (lower == "l2") return DistanceNorm::kL2;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown norm '", std::string(text), "' (expected l1 or l2)"));
}

FeatureDistanceStats FeatureDistanceStats::Compute(const Dataset& dataset) {
  FeatureDistanceStats out;
  for (const FeatureStatistics& s : dataset.statistics()) {
    out.kinds.push_back(s.schema.kind);
    if (s.numeric) {
      out.scales.push_back(s.numeric->std);
      continue;
    }
    double collision = 0.0;
    if (s.count == 0) {
      collision = 1.0;
    } else {
      const double total = static_cast<double>(s.count);
      for (const auto& [value, count] : s.categorical->value_counts) {
        const double p = static_cast<double>(count) / total;
        collision += p * p;
      }
    }
    out.scales.push_back(collision);
  }
  return out;
}

double FeatureDistance(FeatureKind kind, const Value& a, const Value& b,
                       double scale) {
  const bool a_missing = IsMissing(a);
  const bool b_missing = IsMissing(b);
  if (a_missing && b_missing) return 0.0;
  if (kind == FeatureKind::kNumeric) {
    // A constant column never separates points, missing cells included.
    if (scale == 0.0) return 0.0;
    if (a_missing || b_missing) return 1.0;
    return std::abs(*AsNumber(a) - *AsNumber(b)) / scale;
  }
  if (a_missing || b_missing) return scale;
  return a == b ? 0.0 : scale;
}

std::vector<double> PerFeatureDistances(Row a, Row b,
                                        const FeatureDistanceStats& stats) {
  std::vector<double> out(stats.kinds.size());
  for (size_t f = 0; f < out.size(); ++f) {
    out[f] = FeatureDistance(stats.kinds[f], a[f], b[f], stats.scales[f]);
  }
  return out;
}

double DatapointDistance(Row a, Row b, DistanceNorm norm,
                         const FeatureDistanceStats& stats,
                         std::span<const bool> mask) {
  double total = 0.0;
  for (size_t f = 0; f < stats.kinds.size(); ++f) {
    if (!mask.empty() && !mask[f]) continue;
    const double d = FeatureDistance(stats.kinds[f], a[f], b[f], stats.scales[f]);
    total += norm == DistanceNorm::kL1 ? d : d * d;
  }
  return norm == DistanceNorm::kL1 ? total : std::sqrt(total);
}

namespace {

double PopulationStd(std::span<const PredictionOutput> predictions) {
  if (predictions.empty()) return 0.0;
  double mean = 0.0;
  for (const PredictionOutput& p : predictions) mean += p.primary();
  mean /= static_cast<double>(predictions.size());
  double var = 0.0;
  for (const PredictionOutput& p : predictions) {
    var += (p.primary() - mean) * (p.primary() - mean);
  }
  return std::sqrt(var / static_cast<double>(predictions.size()));
}

}  // namespace

absl::StatusOr<CounterfactualResult> NearestCounterfactual(
    const Dataset& dataset, std::span<const PredictionOutput> predictions,
    PointId anchor_id, DistanceNorm norm, const OutcomePolicy& policy) {
  if (predictions.size() != dataset.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", predictions.size(), " predictions for ",
                     dataset.size(), " points"));
  }
  absl::StatusOr<size_t> anchor_index = dataset.IndexOf(anchor_id);
  if (!anchor_index.ok()) return anchor_index.status();

  const PredictionOutput& anchor_prediction = predictions[*anchor_index];
  const TaskKind task = anchor_prediction.task;
  double margin = 0.0;
  if (task.is_regression()) {
    margin = policy.regression_margin.value_or(PopulationStd(predictions));
  }
  auto differs = [&](const PredictionOutput& other) {
    switch (task.type) {
      case TaskKind::Type::kBinary:
        return (other.primary() >= policy.threshold) !=
               (anchor_prediction.primary() >= policy.threshold);
      case TaskKind::Type::kMulticlass:
        return other.ArgmaxClass() != anchor_prediction.ArgmaxClass();
      case TaskKind::Type::kRegression:
        return std::abs(other.primary() - anchor_prediction.primary()) > margin;
    }
    return false;
  };

  const FeatureDistanceStats stats = FeatureDistanceStats::Compute(dataset);
  const Row anchor_row = dataset.point(*anchor_index).row();
  CounterfactualResult result;
  result.anchor_id = anchor_id;
  result.norm = norm;
  std::optional<size_t> best;
  double best_distance = 0.0;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (i == *anchor_index || !differs(predictions[i])) continue;
    const double d =
        DatapointDistance(anchor_row, dataset.point(i).row(), norm, stats);
    // Points are in id order, so strict improvement keeps the lowest id.
    if (!best || d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  if (!best) return result;

  const DataPoint& match = dataset.point(*best);
  result.match_id = match.id;
  result.distance = best_distance;
  const std::vector<double> per_feature =
      PerFeatureDistances(anchor_row, match.row(), stats);
  for (size_t f = 0; f < dataset.num_features(); ++f) {
    result.per_feature_deltas.push_back(
        FeatureDelta{dataset.features()[f].name, anchor_row[f],
                     match.values[f], per_feature[f]});
  }
  return result;
}

absl::StatusOr<CounterfactualResult> NearestCounterfactual(
    const Dataset& dataset, const ModelHandle& model, PointId anchor_id,
    DistanceNorm norm, const OutcomePolicy& policy) {
  if (absl::StatusOr<size_t> index = dataset.IndexOf(anchor_id); !index.ok()) {
    return index.status();
  }
  absl::StatusOr<std::vector<PredictionOutput>> predictions =
      model.PredictDataset(dataset);
  if (!predictions.ok()) return predictions.status();
  return NearestCounterfactual(dataset, *predictions, anchor_id, norm, policy);
}

std::string DistanceFeatureName(DistanceNorm norm, PointId anchor_id) {
  return absl::StrCat("distance_", std::string(NormName(norm)), "_to_",
                      anchor_id);
}

absl::StatusOr<std::string> AttachDistanceFeature(Dataset& dataset,
                                                  PointId anchor_id,
                                                  DistanceNorm norm) {
  absl::StatusOr<size_t> anchor_index = dataset.IndexOf(anchor_id);
  if (!anchor_index.ok()) return anchor_index.status();
  const FeatureDistanceStats stats = FeatureDistanceStats::Compute(dataset);
  const Row anchor_row = dataset.point(*anchor_index).row();
  std::unordered_map<PointId, double> values;
  values.reserve(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    values[dataset.point(i).id] =
        i == *anchor_index
            ? 0.0
            : DatapointDistance(anchor_row, dataset.point(i).row(), norm, stats);
  }
  return dataset.AddDerivedFeature(DistanceFeatureName(norm, anchor_id),
                                   std::move(values));
}

}  // namespace whatif
