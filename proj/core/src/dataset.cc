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

#include "whatif/dataset.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

namespace whatif {

std::string_view OriginKindName(PointOrigin::Kind kind) {
  switch (kind) {
    case PointOrigin::Kind::kLoaded:
      return "loaded";
    case PointOrigin::Kind::kDuplicated:
      return "duplicated";
    case PointOrigin::Kind::kEdited:
      return "edited";
  }
  return "unknown";
}

absl::StatusOr<Dataset> Dataset::Create(std::vector<Feature> features,
                                        std::vector<std::vector<Value>> rows) {
  Dataset ds;
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].name.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature ", i, " has an empty name"));
    }
    for (size_t j = 0; j < i; ++j) {
      if (features[j].name == features[i].name) {
        return absl::InvalidArgumentError(
            absl::StrCat("duplicate feature name '", features[i].name, "'"));
      }
    }
  }
  ds.features_ = std::move(features);
  ds.points_.reserve(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != ds.features_.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r, " has ", rows[r].size(), " values, expected ",
                       ds.features_.size()));
    }
    for (size_t f = 0; f < ds.features_.size(); ++f) {
      if (absl::Status s = ds.CheckCompatible(f, rows[r][f]); !s.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", r, ": ", s.message()));
      }
    }
    auto p = std::make_shared<DataPoint>();
    p->id = r;
    p->values = std::move(rows[r]);
    ds.points_.push_back(std::move(p));
  }
  ds.next_id_ = rows.size();
  return ds;
}

std::optional<size_t> Dataset::FeatureIndex(std::string_view name) const {
  for (size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<Row> Dataset::Rows() const {
  std::vector<Row> rows;
  rows.reserve(points_.size());
  for (const auto& p : points_) rows.push_back(p->row());
  return rows;
}

absl::StatusOr<size_t> Dataset::IndexOf(PointId id) const {
  auto it = std::lower_bound(
      points_.begin(), points_.end(), id,
      [](const std::shared_ptr<const DataPoint>& p, PointId v) {
        return p->id < v;
      });
  if (it == points_.end() || (*it)->id != id) {
    return absl::NotFoundError(absl::StrCat("point ", id, " not found"));
  }
  return static_cast<size_t>(it - points_.begin());
}

absl::StatusOr<const DataPoint*> Dataset::Find(PointId id) const {
  absl::StatusOr<size_t> index = IndexOf(id);
  if (!index.ok()) return index.status();
  return points_[*index].get();
}

absl::Status Dataset::CheckCompatible(size_t feature, const Value& v) const {
  if (IsMissing(v)) return absl::OkStatus();
  const Feature& f = features_[feature];
  if (f.kind == FeatureKind::kNumeric && !AsNumber(v)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature '", f.name, "' is numeric but got '", ValueToString(v), "'"));
  }
  if (f.kind == FeatureKind::kCategorical && !AsString(v)) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature '", f.name, "' is categorical but got number ",
                     ValueToString(v)));
  }
  return absl::OkStatus();
}

absl::StatusOr<DataPoint> Dataset::Edit(PointId id,
                                        const FeatureChanges& changes) {
  absl::StatusOr<size_t> index = IndexOf(id);
  if (!index.ok()) return index.status();
  DataPoint updated = *points_[*index];
  for (const auto& [name, value] : changes) {
    std::optional<size_t> f = FeatureIndex(name);
    if (!f) {
      return absl::NotFoundError(absl::StrCat("unknown feature '", name, "'"));
    }
    if (absl::Status s = CheckCompatible(*f, value); !s.ok()) return s;
    updated.values[*f] = value;
  }
  updated.origin = PointOrigin{PointOrigin::Kind::kEdited, std::nullopt};
  points_[*index] = std::make_shared<const DataPoint>(updated);
  InvalidateStatistics();
  return updated;
}

absl::StatusOr<DataPoint> Dataset::Duplicate(PointId id) {
  absl::StatusOr<size_t> index = IndexOf(id);
  if (!index.ok()) return index.status();
  DataPoint copy = *points_[*index];
  copy.id = next_id_++;
  copy.origin = PointOrigin{PointOrigin::Kind::kDuplicated, id};
  points_.push_back(std::make_shared<const DataPoint>(copy));
  InvalidateStatistics();
  return copy;
}

absl::Status Dataset::Delete(PointId id) {
  absl::StatusOr<size_t> index = IndexOf(id);
  if (!index.ok()) return index.status();
  points_.erase(points_.begin() + static_cast<std::ptrdiff_t>(*index));
  InvalidateStatistics();
  return absl::OkStatus();
}

const DerivedFeature* Dataset::FindDerived(std::string_view name) const {
  for (const DerivedFeature& d : derived_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::string Dataset::AddDerivedFeature(
    std::string name, std::unordered_map<PointId, double> values) {
  auto taken = [this](const std::string& n) {
    return FeatureIndex(n).has_value() || FindDerived(n) != nullptr;
  };
  std::string final_name = name;
  for (int version = 2; taken(final_name); ++version) {
    final_name = absl::StrCat(name, "_v", version);
  }
  derived_.push_back(DerivedFeature{final_name, std::move(values)});
  return final_name;
}

const std::vector<FeatureStatistics>& Dataset::statistics() const {
  std::shared_ptr<StatsCache> cache = stats_;
  std::call_once(cache->once,
                 [&] { cache->stats = ComputeFeatureStatistics(*this); });
  return cache->stats;
}

std::vector<FeatureSchema> Dataset::Schema() const {
  std::vector<FeatureSchema> schema;
  for (const FeatureStatistics& s : statistics()) schema.push_back(s.schema);
  return schema;
}

}  // namespace whatif
