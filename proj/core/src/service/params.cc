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

#include "whatif/service/params.h"

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace whatif {
namespace {

absl::Status BadParam(std::string_view name, const std::string& why) {
  return absl::InvalidArgumentError(
      absl::StrCat("parameter '", std::string(name), "': ", why));
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  for (absl::string_view part : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    std::string item(absl::StripAsciiWhitespace(part));
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

absl::StatusOr<std::string> ScalarParam(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return FormatNumber(v.get<double>());
  if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
  return absl::InvalidArgumentError(
      absl::StrCat("expected a scalar, got ", v.type_name()));
}

absl::Status ApplyBinding(const Params& params, GroundTruthBinding& binding) {
  if (std::optional<std::string> label = GetParam(params, "label")) {
    binding.feature = *label;
  }
  if (std::optional<std::string> positive = GetParam(params, "positive")) {
    binding.positive_value = *positive;
  }
  if (std::optional<std::string> classes = GetParam(params, "classes")) {
    binding.class_order = SplitList(*classes);
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Params> ParamsFromJson(const nlohmann::json& body) {
  if (!body.is_object()) {
    return absl::InvalidArgumentError("request body must be a JSON object");
  }
  Params params;
  for (const auto& [key, value] : body.items()) {
    if (value.is_null()) continue;
    if (key == "thresholds" && value.is_object()) {
      params[key] = value.dump();
      continue;
    }
    if (value.is_array()) {
      std::vector<std::string> parts;
      for (const nlohmann::json& item : value) {
        absl::StatusOr<std::string> s = ScalarParam(item);
        if (!s.ok()) return BadParam(key, std::string(s.status().message()));
        parts.push_back(*std::move(s));
      }
      params[key] = absl::StrJoin(parts, ",");
      continue;
    }
    absl::StatusOr<std::string> s = ScalarParam(value);
    if (!s.ok()) return BadParam(key, std::string(s.status().message()));
    params[key] = *std::move(s);
  }
  return params;
}

std::optional<std::string> GetParam(const Params& params, std::string_view name) {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<std::optional<uint64_t>> GetUintParam(const Params& params,
                                                     std::string_view name) {
  std::optional<std::string> v = GetParam(params, name);
  if (!v) return std::optional<uint64_t>();
  uint64_t out = 0;
  if (!absl::SimpleAtoi(*v, &out)) {
    return BadParam(name, absl::StrCat("'", *v, "' is not a non-negative integer"));
  }
  return std::optional<uint64_t>(out);
}

absl::StatusOr<std::optional<double>> GetNumberParam(const Params& params,
                                                     std::string_view name) {
  std::optional<std::string> v = GetParam(params, name);
  if (!v) return std::optional<double>();
  std::optional<double> d = ParseFiniteNumber(*v);
  if (!d) return BadParam(name, absl::StrCat("'", *v, "' is not a number"));
  return d;
}

absl::StatusOr<bool> GetFlagParam(const Params& params, std::string_view name) {
  std::optional<std::string> v = GetParam(params, name);
  if (!v) return false;
  const std::string t = absl::AsciiStrToLower(*v);
  if (t.empty() || t == "1" || t == "true" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "no") return false;
  return BadParam(name, absl::StrCat("'", *v, "' is not a boolean"));
}

absl::StatusOr<std::optional<ModelSlot>> GetSlotParam(const Params& params,
                                                      std::string_view name) {
  std::optional<std::string> v = GetParam(params, name);
  if (!v) return std::optional<ModelSlot>();
  absl::StatusOr<ModelSlot> slot = ParseSlot(*v);
  if (!slot.ok()) return BadParam(name, std::string(slot.status().message()));
  return std::optional<ModelSlot>(*slot);
}

absl::StatusOr<BinsQuery> ParseBinsQuery(const Params& params,
                                         const SessionSettings& settings) {
  BinsQuery q;
  q.spec.x_feature = GetParam(params, "x");
  q.spec.y_feature = GetParam(params, "y");
  q.spec.color_feature = GetParam(params, "color");
  absl::StatusOr<std::optional<uint64_t>> bins = GetUintParam(params, "bins");
  if (!bins.ok()) return bins.status();
  q.spec.numeric_bin_count = bins->value_or(settings.numeric_bin_count);
  if (GetParam(params, "label")) {
    GroundTruthBinding b = settings.ground_truth.value_or(GroundTruthBinding{});
    if (absl::Status s = ApplyBinding(params, b); !s.ok()) return s;
    q.ground_truth = std::move(b);
  }
  return q;
}

absl::StatusOr<CounterfactualQuery> ParseCounterfactualQuery(
    const Params& params) {
  CounterfactualQuery q;
  absl::StatusOr<std::optional<uint64_t>> point = GetUintParam(params, "point");
  if (!point.ok()) return point.status();
  if (!*point) return BadParam("point", "required");
  q.point = **point;
  if (std::optional<std::string> norm = GetParam(params, "norm")) {
    absl::StatusOr<DistanceNorm> n = ParseNorm(*norm);
    if (!n.ok()) return BadParam("norm", std::string(n.status().message()));
    q.norm = *n;
  }
  absl::StatusOr<std::optional<ModelSlot>> model = GetSlotParam(params, "model");
  if (!model.ok()) return model.status();
  q.model = model->value_or(ModelSlot::kModel1);
  absl::StatusOr<std::optional<double>> threshold =
      GetNumberParam(params, "threshold");
  if (!threshold.ok()) return threshold.status();
  q.threshold = *threshold;
  absl::StatusOr<std::optional<double>> margin = GetNumberParam(params, "margin");
  if (!margin.ok()) return margin.status();
  q.regression_margin = *margin;
  return q;
}

absl::StatusOr<PdpQuery> ParsePdpQuery(const Params& params) {
  PdpQuery q;
  std::optional<std::string> feature = GetParam(params, "feature");
  if (!feature || feature->empty()) return BadParam("feature", "required");
  q.spec.feature = *feature;

  absl::StatusOr<std::optional<uint64_t>> point = GetUintParam(params, "point");
  if (!point.ok()) return point.status();
  absl::StatusOr<bool> global = GetFlagParam(params, "global");
  if (!global.ok()) return global.status();
  if (*point && *global) {
    return BadParam("global", "cannot be combined with 'point'");
  }
  q.point = *point;

  if (std::optional<std::string> range = GetParam(params, "range")) {
    std::vector<std::string> parts = absl::StrSplit(*range, ':');
    std::optional<double> lo;
    std::optional<double> hi;
    if (parts.size() == 2) {
      lo = ParseFiniteNumber(parts[0]);
      hi = ParseFiniteNumber(parts[1]);
    }
    if (!lo || !hi) return BadParam("range", "expected lo:hi");
    q.spec.range = std::make_pair(*lo, *hi);
  }
  absl::StatusOr<std::optional<uint64_t>> n = GetUintParam(params, "num_points");
  if (!n.ok()) return n.status();
  if (*n) q.spec.num_points = static_cast<size_t>(**n);
  if (std::optional<std::string> values = GetParam(params, "values")) {
    q.spec.categorical_values = SplitList(*values);
  }
  absl::StatusOr<std::optional<uint64_t>> top_n = GetUintParam(params, "top_n");
  if (!top_n.ok()) return top_n.status();
  if (*top_n) q.spec.top_n_classes = static_cast<size_t>(**top_n);
  absl::StatusOr<std::optional<ModelSlot>> model = GetSlotParam(params, "model");
  if (!model.ok()) return model.status();
  q.model = *model;
  return q;
}

absl::StatusOr<PerformanceRequest> ParsePerformanceRequest(
    const Params& params, const SessionSettings& settings) {
  PerformanceRequest r;
  if (GetParam(params, "label")) {
    if (absl::Status s = ApplyBinding(params, r.binding); !s.ok()) return s;
  } else if (settings.ground_truth) {
    r.binding = *settings.ground_truth;
    if (absl::Status s = ApplyBinding(params, r.binding); !s.ok()) return s;
  }
  if (std::optional<std::string> slice_by = GetParam(params, "slice_by")) {
    r.slicing.features = SplitList(*slice_by);
    if (r.slicing.features.size() > 2) {
      return BadParam("slice_by", "at most two features");
    }
  }
  absl::StatusOr<std::optional<uint64_t>> bins = GetUintParam(params, "bins");
  if (!bins.ok()) return bins.status();
  r.slicing.numeric_bin_count = bins->value_or(settings.numeric_bin_count);

  absl::StatusOr<std::optional<double>> threshold =
      GetNumberParam(params, "threshold");
  if (!threshold.ok()) return threshold.status();
  r.threshold = *threshold;
  if (std::optional<std::string> thresholds = GetParam(params, "thresholds")) {
    nlohmann::json j = nlohmann::json::parse(*thresholds, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return BadParam("thresholds", "expected a JSON object of slice -> threshold");
    }
    for (const auto& [key, value] : j.items()) {
      if (!value.is_number()) {
        return BadParam("thresholds", absl::StrCat("'", key, "' is not a number"));
      }
      r.slice_thresholds[key] = value.get<double>();
    }
  }
  absl::StatusOr<std::optional<double>> cost = GetNumberParam(params, "cost_ratio");
  if (!cost.ok()) return cost.status();
  if (*cost) {
    absl::StatusOr<CostRatio> c = CostRatio::Create(**cost);
    if (!c.ok()) return BadParam("cost_ratio", std::string(c.status().message()));
    r.cost_ratio = *c;
  }
  if (std::optional<std::string> strategy = GetParam(params, "strategy")) {
    absl::StatusOr<FairnessStrategy> s = ParseStrategy(*strategy);
    if (!s.ok()) return BadParam("strategy", std::string(s.status().message()));
    r.strategy = *s;
  }
  absl::StatusOr<std::optional<double>> epsilon = GetNumberParam(params, "epsilon");
  if (!epsilon.ok()) return epsilon.status();
  r.epsilon = epsilon->value_or(settings.epsilon);
  if (r.epsilon < 0) return BadParam("epsilon", "must be non-negative");
  if (std::optional<std::string> sort = GetParam(params, "sort")) {
    absl::StatusOr<SliceSort> s = ParseSliceSort(*sort);
    if (!s.ok()) return BadParam("sort", std::string(s.status().message()));
    r.sort = *s;
  }
  return r;
}

}  // namespace whatif
