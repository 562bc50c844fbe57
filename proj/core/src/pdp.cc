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

#include "whatif/pdp.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace whatif {
namespace {

absl::Status ValidateSpec(const Dataset& dataset, const PdpSpec& spec,
                          size_t& feature) {
  if (spec.num_points < 2) {
    return absl::InvalidArgumentError("num_points must be at least 2");
  }
  if (spec.range && !(spec.range->first < spec.range->second)) {
    return absl::InvalidArgumentError("range must satisfy lo < hi");
  }
  const std::vector<std::string> eligible = EligibleFeatures(dataset);
  if (std::find(eligible.begin(), eligible.end(), spec.feature) ==
      eligible.end()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "no partial dependence for '", spec.feature,
        "': unknown, derived, or identifier-like feature"));
  }
  feature = *dataset.FeatureIndex(spec.feature);
  if (dataset.features()[feature].kind == FeatureKind::kCategorical &&
      spec.range) {
    return absl::InvalidArgumentError(
        "range applies to numeric features only");
  }
  return absl::OkStatus();
}

// Classes to plot for a multiclass model, by descending mean score.
std::vector<int> TopClasses(std::span<const PredictionOutput> outputs,
                            size_t top_n) {
  const size_t k = outputs.front().scores.size();
  std::vector<double> mean(k, 0.0);
  for (const PredictionOutput& o : outputs) {
    for (size_t c = 0; c < k; ++c) mean[c] += o.scores[c];
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return mean[a] > mean[b]; });
  order.resize(std::min(top_n, k));
  return order;
}

std::vector<PdpSeries> SeriesFor(ModelSlot slot, const TaskKind& task,
                                 const std::vector<int>& classes,
                                 size_t num_xs) {
  std::vector<PdpSeries> out;
  if (task.is_multiclass()) {
    for (int c : classes) {
      out.push_back(PdpSeries{slot, c, std::vector<double>(num_xs, 0.0)});
    }
  } else {
    out.push_back(PdpSeries{slot, std::nullopt, std::vector<double>(num_xs, 0.0)});
  }
  return out;
}

void AddThresholds(std::span<const PdpModel> models, PdpCurve& curve) {
  for (const PdpModel& m : models) {
    if (m.handle->task().is_binary()) {
      curve.thresholds.emplace_back(m.handle->slot(), m.threshold);
    }
  }
}

absl::Status CheckModels(std::span<const PdpModel> models) {
  if (models.empty()) {
    return absl::FailedPreconditionError("no model registered");
  }
  for (const PdpModel& m : models) {
    if (m.handle == nullptr) return absl::InvalidArgumentError("null model");
  }
  return absl::OkStatus();
}

}  // namespace

std::vector<std::string> EligibleFeatures(const Dataset& dataset) {
  std::vector<std::string> out;
  const std::vector<FeatureStatistics>& stats = dataset.statistics();
  for (const FeatureStatistics& s : stats) {
    const bool id_like =
        dataset.size() >= 2 && s.schema.distinct_count == dataset.size();
    if (!id_like) out.push_back(s.schema.name);
  }
  return out;
}

absl::StatusOr<std::vector<Value>> PdpGrid(const Dataset& dataset,
                                           const PdpSpec& spec) {
  size_t feature = 0;
  if (absl::Status s = ValidateSpec(dataset, spec, feature); !s.ok()) return s;
  const FeatureStatistics& stats = dataset.statistics()[feature];
  std::vector<Value> xs;
  if (dataset.features()[feature].kind == FeatureKind::kCategorical) {
    if (spec.categorical_values) {
      for (const std::string& v : *spec.categorical_values) xs.emplace_back(v);
    } else {
      for (const auto& [value, count] : stats.categorical->value_counts) {
        if (xs.size() == kDefaultCategoricalPdpValues) break;
        xs.emplace_back(value);
      }
    }
    if (xs.empty()) {
      return absl::FailedPreconditionError(
          absl::StrCat("feature '", spec.feature, "' has no values to sweep"));
    }
    return xs;
  }
  double lo = 0.0;
  double hi = 0.0;
  if (spec.range) {
    std::tie(lo, hi) = *spec.range;
  } else {
    if (stats.count == 0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "feature '", spec.feature, "' has no values; give a range"));
    }
    lo = stats.numeric->min;
    hi = stats.numeric->max;
  }
  if (lo == hi) return std::vector<Value>{Value{lo}};
  const size_t n = spec.num_points;
  for (size_t i = 0; i < n; ++i) {
    const double x =
        i + 1 == n ? hi
                   : lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(n - 1);
    xs.emplace_back(x);
  }
  return xs;
}

absl::StatusOr<PdpCurve> LocalPdp(const Dataset& dataset,
                                  std::span<const PdpModel> models,
                                  PointId point_id, const PdpSpec& spec) {
  if (absl::Status s = CheckModels(models); !s.ok()) return s;
  absl::StatusOr<const DataPoint*> point = dataset.Find(point_id);
  if (!point.ok()) return point.status();
  absl::StatusOr<std::vector<Value>> xs = PdpGrid(dataset, spec);
  if (!xs.ok()) return xs.status();
  const size_t feature = *dataset.FeatureIndex(spec.feature);

  PdpCurve curve;
  curve.feature = spec.feature;
  curve.kind = dataset.features()[feature].kind;
  curve.point_id = point_id;
  curve.original_value = (*point)->values[feature];
  curve.xs = *xs;

  std::vector<std::vector<Value>> copies(xs->size(), (*point)->values);
  std::vector<Row> rows;
  rows.reserve(copies.size());
  for (size_t i = 0; i < copies.size(); ++i) {
    copies[i][feature] = (*xs)[i];
    rows.push_back(copies[i]);
  }
  const Row original = (*point)->row();
  for (const PdpModel& m : models) {
    absl::StatusOr<std::vector<PredictionOutput>> outputs =
        m.handle->PredictBatch(dataset.features(), rows, CachePolicy::kBypass);
    if (!outputs.ok()) return outputs.status();
    std::vector<int> classes;
    if (m.handle->task().is_multiclass()) {
      absl::StatusOr<std::vector<PredictionOutput>> current =
          m.handle->PredictBatch(dataset.features(), std::span(&original, 1));
      if (!current.ok()) return current.status();
      classes = TopClasses(*current, spec.top_n_classes);
    }
    std::vector<PdpSeries> series =
        SeriesFor(m.handle->slot(), m.handle->task(), classes, xs->size());
    for (PdpSeries& s : series) {
      const size_t c = s.class_index ? static_cast<size_t>(*s.class_index) : 0;
      for (size_t i = 0; i < xs->size(); ++i) s.ys[i] = (*outputs)[i].scores[c];
      curve.series.push_back(std::move(s));
    }
  }
  AddThresholds(models, curve);
  return curve;
}

absl::StatusOr<PdpCurve> GlobalPdp(const Dataset& dataset,
                                   std::span<const PdpModel> models,
                                   const PdpSpec& spec,
                                   const PdpProgress& progress) {
  if (absl::Status s = CheckModels(models); !s.ok()) return s;
  if (dataset.empty()) {
    return absl::FailedPreconditionError("dataset is empty");
  }
  absl::StatusOr<std::vector<Value>> xs = PdpGrid(dataset, spec);
  if (!xs.ok()) return xs.status();
  const size_t feature = *dataset.FeatureIndex(spec.feature);
  const size_t n = dataset.size();

  PdpCurve curve;
  curve.feature = spec.feature;
  curve.kind = dataset.features()[feature].kind;
  curve.xs = *xs;

  const size_t total_steps = models.size() * xs->size();
  size_t done = 0;
  std::vector<std::vector<Value>> copies(n);
  std::vector<Row> rows(n);
  for (const PdpModel& m : models) {
    std::vector<int> classes;
    if (m.handle->task().is_multiclass()) {
      absl::StatusOr<std::vector<PredictionOutput>> current =
          m.handle->PredictDataset(dataset);
      if (!current.ok()) return current.status();
      classes = TopClasses(*current, spec.top_n_classes);
    }
    std::vector<PdpSeries> series =
        SeriesFor(m.handle->slot(), m.handle->task(), classes, xs->size());
    for (size_t i = 0; i < xs->size(); ++i) {
      for (size_t p = 0; p < n; ++p) {
        copies[p] = dataset.point(p).values;
        copies[p][feature] = (*xs)[i];
        rows[p] = copies[p];
      }
      absl::StatusOr<std::vector<PredictionOutput>> outputs =
          m.handle->PredictBatch(dataset.features(), rows, CachePolicy::kBypass);
      if (!outputs.ok()) return outputs.status();
      for (PdpSeries& s : series) {
        const size_t c = s.class_index ? static_cast<size_t>(*s.class_index) : 0;
        double sum = 0.0;
        for (const PredictionOutput& o : *outputs) sum += o.scores[c];
        s.ys[i] = sum / static_cast<double>(n);
      }
      if (progress) progress(++done, total_steps);
    }
    for (PdpSeries& s : series) curve.series.push_back(std::move(s));
  }
  AddThresholds(models, curve);
  return curve;
}

bool IsFlat(std::span<const double> ys, double tolerance) {
  if (ys.empty()) return true;
  auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  return *hi - *lo < tolerance;
}

}  // namespace whatif
