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

#ifndef WHATIF_DATASET_H_
#define WHATIF_DATASET_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "whatif/statistics.h"
#include "whatif/value.h"

namespace whatif {

using PointId = uint64_t;

struct PointOrigin {
  enum class Kind { kLoaded, kDuplicated, kEdited };
  Kind kind = Kind::kLoaded;
  // Set for kDuplicated: the id the point was copied from.
  std::optional<PointId> source;

  bool operator==(const PointOrigin&) const = default;
};

std::string_view OriginKindName(PointOrigin::Kind kind);

struct DataPoint {
  PointId id = 0;
  // One value per schema feature, in schema order.
  std::vector<Value> values;
  PointOrigin origin;

  Row row() const { return values; }
};

// A read-only, per-point numeric column computed at runtime (for example the
// distance of every point to a selected anchor). Derived features are never
// model inputs, and are not used by counterfactual distances or partial
// dependence.
struct DerivedFeature {
  std::string name;
  std::unordered_map<PointId, double> values;
};

using FeatureChanges = std::vector<std::pair<std::string, Value>>;

// An ordered collection of datapoints sharing a fixed schema.
//
// Points are kept sorted by id: loaded points get ids 0..n-1 in file order and
// every new point gets a fresh id greater than all ids ever issued. Ids are
// never reused after deletion.
//
// Copies are cheap: points are held through shared immutable storage and a
// mutation replaces only the touched point. Feature statistics are computed
// lazily and cached until the next mutation.
class Dataset {
 public:
  Dataset() = default;

  // Builds a dataset from rows that already conform to `features`. Rows get
  // ids 0..n-1.
  static absl::StatusOr<Dataset> Create(std::vector<Feature> features,
                                        std::vector<std::vector<Value>> rows);

  const std::vector<Feature>& features() const { return features_; }
  size_t num_features() const { return features_.size(); }
  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  std::optional<size_t> FeatureIndex(std::string_view name) const;

  // Positional access, in id order.
  const DataPoint& point(size_t index) const { return *points_[index]; }
  std::vector<Row> Rows() const;

  // Position of `id`, or NotFound.
  absl::StatusOr<size_t> IndexOf(PointId id) const;
  absl::StatusOr<const DataPoint*> Find(PointId id) const;

  PointId next_id() const { return next_id_; }

  // Replaces values of the named features. Numeric features accept numbers or
  // missing, categorical features accept strings or missing.
  absl::StatusOr<DataPoint> Edit(PointId id, const FeatureChanges& changes);
  // Copies every value into a new point with a fresh id appended at the end.
  absl::StatusOr<DataPoint> Duplicate(PointId id);
  absl::Status Delete(PointId id);

  const std::vector<DerivedFeature>& derived_features() const {
    return derived_;
  }
  const DerivedFeature* FindDerived(std::string_view name) const;
  // Adds a derived feature. If `name` is taken (by a schema or derived
  // feature) a suffix "_v2", "_v3", ... is appended. Returns the final name.
  std::string AddDerivedFeature(std::string name,
                                std::unordered_map<PointId, double> values);

  // Statistics over the current points, cached until the next mutation.
  const std::vector<FeatureStatistics>& statistics() const;
  std::vector<FeatureSchema> Schema() const;

 private:
  struct StatsCache {
    std::once_flag once;
    std::vector<FeatureStatistics> stats;
  };

  void InvalidateStatistics() { stats_ = std::make_shared<StatsCache>(); }
  absl::Status CheckCompatible(size_t feature, const Value& v) const;

  std::vector<Feature> features_;
  std::vector<std::shared_ptr<const DataPoint>> points_;
  std::vector<DerivedFeature> derived_;
  PointId next_id_ = 0;
  mutable std::shared_ptr<StatsCache> stats_ = std::make_shared<StatsCache>();
};

}  // namespace whatif

#endif  // WHATIF_DATASET_H_
