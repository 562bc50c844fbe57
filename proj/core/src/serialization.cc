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

#include "whatif/serialization.h"

#include <algorithm>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace whatif {
namespace {

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string StatusCodeName(absl::StatusCode code) {
  std::string name = absl::StatusCodeToString(code);
  for (char& c : name) c = c == ' ' ? '_' : absl::ascii_toupper(c);
  return name;
}

}  // namespace

std::string RenderJson(const Json& doc) {
  std::string out = doc.dump(2, ' ', false, Json::error_handler_t::replace);
  out.push_back('\n');
  return out;
}

Json ToJson(const Value& value) {
  if (const double* d = AsNumber(value)) return *d;
  if (const std::string* s = AsString(value)) return *s;
  return nullptr;
}

absl::StatusOr<Value> ValueFromJson(const nlohmann::json& j) {
  if (j.is_null()) return Value{};
  if (j.is_number()) {
    const double d = j.get<double>();
    if (!std::isfinite(d)) return absl::InvalidArgumentError("non-finite number");
    return Value{d};
  }
  if (j.is_string()) return Value{j.get<std::string>()};
  if (j.is_boolean()) return Value{std::string(j.get<bool>() ? "true" : "false")};
  return absl::InvalidArgumentError(
      absl::StrCat("expected a number, string or null, got ", j.type_name()));
}

std::string_view SortKeyName(FeatureSortKey key) {
  switch (key) {
    case FeatureSortKey::kNonUniformity:
      return "non-uniformity";
    case FeatureSortKey::kMissingOrZeroCount:
      return "missing";
    case FeatureSortKey::kAlphabetical:
      return "alpha";
  }
  return "non-uniformity";
}

absl::StatusOr<FeatureSortKey> ParseSortKey(std::string_view text) {
  const std::string t = absl::AsciiStrToLower(std::string(text));
  if (t == "non-uniformity" || t == "nonuniformity" || t == "non_uniformity") {
    return FeatureSortKey::kNonUniformity;
  }
  if (t == "missing" || t == "missing-or-zero" || t == "zeros") {
    return FeatureSortKey::kMissingOrZeroCount;
  }
  if (t == "alpha" || t == "alphabetical") return FeatureSortKey::kAlphabetical;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown sort '", std::string(text),
      "'; expected non-uniformity, missing or alpha"));
}

Json ToJson(const FeatureStatistics& stats) {
  Json j;
  j["kind"] = std::string(FeatureKindName(stats.schema.kind));
  j["count"] = stats.count;
  j["distinct_count"] = stats.schema.distinct_count;
  j["missing_count"] = stats.schema.missing_count;
  j["zero_count"] = stats.schema.zero_count;
  j["non_uniformity"] = stats.non_uniformity;
  j["display_mode"] =
      stats.display_mode == DisplayMode::kHistogram ? "histogram" : "cdf";
  if (stats.numeric) {
    const NumericSummary& n = *stats.numeric;
    j["numeric"] = Json{{"min", n.min},   {"max", n.max},
                        {"mean", n.mean}, {"std", n.std},
                        {"histogram", n.histogram}};
  }
  if (stats.categorical) {
    Json counts = Json::object();
    for (const auto& [value, count] : stats.categorical->value_counts) {
      counts[value] = count;
    }
    j["categorical"] = Json{{"value_counts", std::move(counts)},
                            {"most_frequent", stats.categorical->most_frequent}};
  }
  return j;
}

Json StatisticsToJson(const Dataset& dataset, FeatureSortKey sort) {
  const std::vector<FeatureStatistics>& stats = dataset.statistics();
  Json features = Json::object();
  for (const FeatureStatistics& s : stats) features[s.schema.name] = ToJson(s);
  return Json{{"num_points", dataset.size()},
              {"sort", std::string(SortKeyName(sort))},
              {"order", SortFeatures(stats, sort)},
              {"features", std::move(features)}};
}

Json ToJson(const Dataset& dataset, const DataPoint& point) {
  Json values = Json::object();
  for (size_t f = 0; f < dataset.num_features(); ++f) {
    values[dataset.features()[f].name] = ToJson(point.values[f]);
  }
  Json origin = {{"kind", std::string(OriginKindName(point.origin.kind))}};
  if (point.origin.source) origin["source"] = *point.origin.source;
  Json j = {{"id", point.id}, {"values", std::move(values)},
            {"origin", std::move(origin)}};
  if (!dataset.derived_features().empty()) {
    Json derived = Json::object();
    for (const DerivedFeature& d : dataset.derived_features()) {
      auto it = d.values.find(point.id);
      derived[d.name] = it == d.values.end() ? Json(nullptr) : Json(it->second);
    }
    j["derived"] = std::move(derived);
  }
  return j;
}

Json PointsPageToJson(const Dataset& dataset, size_t offset, size_t limit) {
  Json points = Json::array();
  const size_t end = std::min(dataset.size(), offset + std::min(limit, dataset.size()));
  for (size_t i = offset; i < end; ++i) {
    points.push_back(ToJson(dataset, dataset.point(i)));
  }
  return Json{{"total", dataset.size()},
              {"offset", offset},
              {"limit", limit},
              {"points", std::move(points)}};
}

Json SchemaToJson(const Dataset& dataset) {
  Json features = Json::array();
  for (const Feature& f : dataset.features()) {
    features.push_back(
        Json{{"name", f.name}, {"kind", std::string(FeatureKindName(f.kind))}});
  }
  Json derived = Json::array();
  for (const DerivedFeature& d : dataset.derived_features()) {
    derived.push_back(d.name);
  }
  return Json{{"num_points", dataset.size()},
              {"features", std::move(features)},
              {"derived_features", std::move(derived)}};
}

Json ToJson(const BinLayout& layout) {
  auto axis = [](const BinAxis& a) {
    return Json{{"feature", a.feature ? Json(*a.feature) : Json(nullptr)},
                {"labels", a.labels}};
  };
  Json points = Json::array();
  for (const PointBins& p : layout.points) {
    Json pj = {{"id", p.id}, {"x", p.x_bin}, {"y", p.y_bin}};
    if (!p.color_key.empty()) pj["color"] = p.color_key;
    points.push_back(std::move(pj));
  }
  return Json{{"x", axis(layout.x)}, {"y", axis(layout.y)},
              {"points", std::move(points)}};
}

Json ToJson(const PredictionOutput& output) {
  Json j = {{"task", TaskKindToString(output.task)},
            {"score", output.primary()},
            {"scores", output.scores}};
  if (output.task.type == TaskKind::Type::kMulticlass) {
    j["class"] = output.ArgmaxClass();
  }
  return j;
}

Json ToJson(const ScoreDelta& delta) {
  return Json{{"delta", delta.delta},
              {"direction", std::string(DirectionName(delta.direction))}};
}

Json ToJson(const ModelHandle& model) {
  return Json{{"slot", std::string(SlotName(model.slot()))},
              {"name", model.display_name()},
              {"task", TaskKindToString(model.task())},
              {"backend", model.backend()}};
}

Json ToJson(const CounterfactualResult& result) {
  Json deltas = Json::array();
  for (const FeatureDelta& d : result.per_feature_deltas) {
    deltas.push_back(Json{{"feature", d.feature},
                          {"anchor_value", ToJson(d.anchor_value)},
                          {"match_value", ToJson(d.match_value)},
                          {"distance", d.distance},
                          {"differs", d.anchor_value != d.match_value}});
  }
  return Json{{"anchor_id", result.anchor_id},
              {"norm", std::string(NormName(result.norm))},
              {"found", result.found()},
              {"match_id", result.match_id ? Json(*result.match_id) : Json(nullptr)},
              {"distance", result.found() ? Json(result.distance) : Json(nullptr)},
              {"per_feature_deltas", std::move(deltas)}};
}

Json ToJson(const PdpCurve& curve) {
  Json xs = Json::array();
  for (const Value& x : curve.xs) xs.push_back(ToJson(x));
  Json series = Json::array();
  for (const PdpSeries& s : curve.series) {
    series.push_back(Json{
        {"model", std::string(SlotName(s.model))},
        {"class", s.class_index ? Json(*s.class_index) : Json(nullptr)},
        {"ys", s.ys},
        {"flat", IsFlat(s.ys)}});
  }
  Json thresholds = Json::array();
  for (const auto& [slot, t] : curve.thresholds) {
    thresholds.push_back(
        Json{{"model", std::string(SlotName(slot))}, {"threshold", t}});
  }
  return Json{
      {"feature", curve.feature},
      {"kind", std::string(FeatureKindName(curve.kind))},
      {"point_id", curve.point_id ? Json(*curve.point_id) : Json(nullptr)},
      {"xs", std::move(xs)},
      {"series", std::move(series)},
      {"original_value",
       curve.original_value ? ToJson(*curve.original_value) : Json(nullptr)},
      {"thresholds", std::move(thresholds)}};
}

Json ToJson(const ConfusionMatrix& m) {
  return Json{{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}};
}

Json ToJson(const RocCurve& roc) {
  Json points = Json::array();
  for (const RocPoint& p : roc.points) {
    points.push_back(
        Json{{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", p.threshold}});
  }
  return Json{{"points", std::move(points)}, {"auc", roc.auc}};
}

Json ToJson(const SliceMetrics& slice) {
  Json j = {{"slice_key", slice.key}, {"count", slice.count}};
  if (slice.confusion) {
    const ConfusionMatrix& m = *slice.confusion;
    j["threshold"] = OptionalNumber(slice.threshold);
    j["confusion"] = ToJson(m);
    j["accuracy"] = m.accuracy();
    j["fp_pct"] = m.false_positive_rate();
    j["fn_pct"] = m.false_negative_rate();
  }
  if (slice.multiclass) {
    const MulticlassConfusion& m = *slice.multiclass;
    Json rows = Json::array();
    for (int a = 0; a < m.num_classes; ++a) {
      Json row = Json::array();
      for (int p = 0; p < m.num_classes; ++p) row.push_back(m.at(a, p));
      rows.push_back(std::move(row));
    }
    j["confusion"] = std::move(rows);
    j["accuracy"] = m.accuracy();
  }
  if (slice.regression) {
    const RegressionMetrics& r = *slice.regression;
    j["mean_error"] = r.mean_error;
    j["mean_absolute_error"] = r.mean_absolute_error;
    j["mean_squared_error"] = r.mean_squared_error;
  }
  return j;
}

Json ToJson(const PerformanceReport& report) {
  Json models = Json::array();
  for (const ModelPerformance& mp : report.models) {
    Json j = {{"model", std::string(SlotName(mp.slot))},
              {"name", mp.display_name},
              {"task", TaskKindToString(mp.task)}};
    if (mp.task.type == TaskKind::Type::kBinary) {
      const ThresholdAssignment& a = mp.assignment;
      Json per_slice = Json::object();
      for (const auto& [key, t] : a.per_slice) per_slice[key] = t;
      j["assignment"] = Json{
          {"strategy",
           a.strategy ? Json(std::string(StrategyName(*a.strategy))) : Json(nullptr)},
          {"global_threshold", a.global_threshold},
          {"per_slice", std::move(per_slice)}};
    }
    j["overall"] = ToJson(mp.overall);
    Json slices = Json::array();
    for (const SliceMetrics& s : mp.slices) slices.push_back(ToJson(s));
    j["slices"] = std::move(slices);
    if (mp.roc) j["roc"] = ToJson(*mp.roc);
    if (mp.fairness) {
      const FairnessSummary& f = *mp.fairness;
      j["fairness"] = Json{{"strategy", std::string(StrategyName(f.strategy))},
                           {"epsilon", f.epsilon},
                           {"achieved_disparity", f.achieved_disparity},
                           {"parity_met", f.parity_met},
                           {"target", OptionalNumber(f.target)}};
    }
    j["warnings"] = mp.warnings;
    models.push_back(std::move(j));
  }
  return Json{{"slice_by", report.slice_by}, {"models", std::move(models)}};
}

Json ErrorToJson(const absl::Status& status) {
  return Json{{"code", StatusCodeName(status.code())},
              {"message", std::string(status.message())}};
}

}  // namespace whatif
