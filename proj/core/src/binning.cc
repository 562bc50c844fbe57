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

#include "whatif/binning.h"

#include <algorithm>
#include <set>

#include "absl/strings/str_cat.h"

namespace whatif {
namespace {

struct Column {
  std::vector<Value> values;
};

absl::StatusOr<Column> ResolveColumn(const Dataset& dataset,
                                     const std::string& name,
                                     const ModelFields& model_fields) {
  Column column;
  if (auto it = model_fields.find(name); it != model_fields.end()) {
    if (it->second.size() != dataset.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("model field '", name, "' has ", it->second.size(),
                       " values for ", dataset.size(), " points"));
    }
    column.values = it->second;
    return column;
  }
  if (std::optional<size_t> f = dataset.FeatureIndex(name)) {
    column.values.reserve(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
      column.values.push_back(dataset.point(i).values[*f]);
    }
    return column;
  }
  if (const DerivedFeature* d = dataset.FindDerived(name)) {
    column.values.reserve(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
      auto it = d->values.find(dataset.point(i).id);
      column.values.push_back(it == d->values.end() ? Value{}
                                                    : Value{it->second});
    }
    return column;
  }
  return absl::NotFoundError(absl::StrCat("unknown feature '", name, "'"));
}

// Bin labels plus the per-point bin index for one axis.
struct AxisAssignment {
  std::vector<std::string> labels;
  std::vector<size_t> bins;
};

AxisAssignment BinColumn(const Column& column, size_t bin_count) {
  AxisAssignment out;
  const std::vector<Value>& values = column.values;
  bool any_missing = false;
  bool any_string = false;
  bool any_number = false;
  for (const Value& v : values) {
    any_missing |= IsMissing(v);
    any_string |= AsString(v) != nullptr;
    any_number |= AsNumber(v) != nullptr;
  }
  out.bins.resize(values.size());

  if (any_number && !any_string) {
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const Value& v : values) {
      if (const double* d = AsNumber(v)) {
        lo = first ? *d : std::min(lo, *d);
        hi = first ? *d : std::max(hi, *d);
        first = false;
      }
    }
    const double width = (hi - lo) / static_cast<double>(bin_count);
    for (size_t b = 0; b < bin_count; ++b) {
      const double left = lo + width * static_cast<double>(b);
      const double right = b + 1 == bin_count
                               ? hi
                               : lo + width * static_cast<double>(b + 1);
      out.labels.push_back(absl::StrCat("[", FormatNumber(left), ", ",
                                        FormatNumber(right),
                                        b + 1 == bin_count ? "]" : ")"));
    }
    for (size_t i = 0; i < values.size(); ++i) {
      if (const double* d = AsNumber(values[i])) {
        out.bins[i] = UniformBinIndex(*d, lo, hi, bin_count);
      } else {
        out.bins[i] = bin_count;
      }
    }
  } else {
    // Categorical, or a mixed model field: bin by rendered value.
    std::set<std::string> distinct;
    for (const Value& v : values) {
      if (!IsMissing(v)) distinct.insert(ValueToString(v));
    }
    out.labels.assign(distinct.begin(), distinct.end());
    for (size_t i = 0; i < values.size(); ++i) {
      if (IsMissing(values[i])) continue;
      const std::string key = ValueToString(values[i]);
      out.bins[i] = static_cast<size_t>(
          std::lower_bound(out.labels.begin(), out.labels.end(), key) -
          out.labels.begin());
    }
    const size_t missing_bin = out.labels.size();
    for (size_t i = 0; i < values.size(); ++i) {
      if (IsMissing(values[i])) out.bins[i] = missing_bin;
    }
  }
  if (any_missing) out.labels.emplace_back(kMissingBinLabel);
  return out;
}

}  // namespace

absl::StatusOr<BinLayout> AssignBins(const Dataset& dataset,
                                     const BinningSpec& spec,
                                     const ModelFields& model_fields) {
  if (spec.numeric_bin_count < 1) {
    return absl::InvalidArgumentError("numeric_bin_count must be at least 1");
  }
  if (spec.x_feature && spec.y_feature && *spec.x_feature == *spec.y_feature) {
    return absl::InvalidArgumentError(
        absl::StrCat("x and y both bound to '", *spec.x_feature, "'"));
  }

  BinLayout layout;
  layout.points.resize(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    layout.points[i].id = dataset.point(i).id;
  }

  auto bind_axis = [&](const std::optional<std::string>& name, BinAxis& axis,
                       size_t PointBins::*member) -> absl::Status {
    axis.feature = name;
    if (!name) {
      axis.labels = {"all"};
      return absl::OkStatus();
    }
    absl::StatusOr<Column> column = ResolveColumn(dataset, *name, model_fields);
    if (!column.ok()) return column.status();
    AxisAssignment assigned = BinColumn(*column, spec.numeric_bin_count);
    axis.labels = std::move(assigned.labels);
    for (size_t i = 0; i < layout.points.size(); ++i) {
      layout.points[i].*member = assigned.bins[i];
    }
    return absl::OkStatus();
  };
  if (absl::Status s = bind_axis(spec.x_feature, layout.x, &PointBins::x_bin);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = bind_axis(spec.y_feature, layout.y, &PointBins::y_bin);
      !s.ok()) {
    return s;
  }
  if (spec.color_feature) {
    absl::StatusOr<Column> column =
        ResolveColumn(dataset, *spec.color_feature, model_fields);
    if (!column.ok()) return column.status();
    AxisAssignment assigned = BinColumn(*column, spec.numeric_bin_count);
    for (size_t i = 0; i < layout.points.size(); ++i) {
      layout.points[i].color_key = assigned.labels[assigned.bins[i]];
    }
  }
  return layout;
}

}  // namespace whatif
