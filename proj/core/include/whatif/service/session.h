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

#ifndef WHATIF_SERVICE_SESSION_H_
#define WHATIF_SERVICE_SESSION_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/synchronization/mutex.h"
#include "whatif/counterfactual.h"
#include "whatif/ingest.h"
#include "whatif/model_registry.h"
#include "whatif/pdp.h"
#include "whatif/performance.h"
#include "whatif/serialization.h"
#include "whatif/statistics.h"
#include "whatif/versioned_dataset.h"

namespace whatif {

// Defaults applied to requests that leave a field unset.
struct SessionSettings {
  std::optional<CostRatio> cost_ratio;
  DistanceNorm norm = DistanceNorm::kL1;
  size_t numeric_bin_count = 10;
  double epsilon = kDefaultParityEpsilon;
  // Classification threshold for counterfactual outcomes, model-derived
  // bin fields and PDP markers.
  double threshold = 0.5;
  std::optional<GroundTruthBinding> ground_truth;
};

// An analysis result and the snapshot version it was computed against.
struct SessionResult {
  Json body;
  uint64_t version = 0;
};

struct PredictQuery {
  // Empty means every registered model.
  std::optional<ModelSlot> model;
  std::vector<PointId> ids;
  // Inline points: feature name -> value. Unnamed features are missing.
  std::vector<std::map<std::string, Value, std::less<>>> points;
};

struct BinsQuery {
  BinningSpec spec;
  std::optional<GroundTruthBinding> ground_truth;
};

struct CounterfactualQuery {
  PointId point = 0;
  std::optional<DistanceNorm> norm;
  ModelSlot model = ModelSlot::kModel1;
  std::optional<double> threshold;
  std::optional<double> regression_margin;
};

struct PdpQuery {
  PdpSpec spec;
  // Unset means the global curve.
  std::optional<PointId> point;
  std::optional<ModelSlot> model;
};

// One dataset plus up to two models, shared by every request.
//
// Dataset mutations are serialized and each publishes a new snapshot
// version; analyses read one snapshot from start to finish. Loading a new
// dataset continues the version sequence and drops score history and
// prediction caches.
class Session {
 public:
  Session();

  const std::string& id() const { return id_; }
  uint64_t version() const;

  absl::StatusOr<SessionResult> LoadDataset(
      std::string_view bytes, DataFormat format, std::string name,
      const std::optional<std::vector<Feature>>& declared_schema = std::nullopt);
  absl::StatusOr<SessionResult> LoadDatasetFile(const std::string& path);

  absl::StatusOr<SessionResult> RegisterModel(ModelSlot slot,
                                              const ModelSource& source,
                                              std::string display_name,
                                              bool replace = false);
  absl::StatusOr<SessionResult> RegisterModel(
      ModelSlot slot, std::shared_ptr<const Model> model,
      std::string display_name, bool replace = false);

  // Empty `dataset_name` matches the loaded dataset.
  absl::Status CheckDatasetName(std::string_view dataset_name) const;
  absl::StatusOr<DatasetSnapshot> Snapshot() const;
  std::vector<std::shared_ptr<const ModelHandle>> Models() const;
  SessionSettings settings() const;

  absl::StatusOr<SessionResult> Info() const;
  absl::StatusOr<SessionResult> UpdateSettings(const nlohmann::json& patch);

  absl::StatusOr<SessionResult> Stats(FeatureSortKey sort) const;
  absl::StatusOr<SessionResult> Points(size_t offset, size_t limit) const;
  absl::StatusOr<SessionResult> EditPoint(PointId id,
                                          const FeatureChanges& changes);
  absl::StatusOr<SessionResult> DuplicatePoint(PointId id);
  absl::StatusOr<SessionResult> DeletePoint(PointId id);

  // Scores points. Scoring a stored point records its score; once a point's
  // score changes (after an edit) the result carries the delta from the
  // previous score.
  absl::StatusOr<SessionResult> Predict(const PredictQuery& query);

  absl::StatusOr<SessionResult> Bins(const BinsQuery& query) const;
  absl::StatusOr<SessionResult> Counterfactual(
      const CounterfactualQuery& query) const;
  absl::StatusOr<SessionResult> AttachDistance(PointId anchor,
                                               std::optional<DistanceNorm> norm);
  absl::StatusOr<SessionResult> Pdp(const PdpQuery& query,
                                    const PdpProgress& progress = {}) const;
  // Fills unset request fields from the settings.
  absl::StatusOr<SessionResult> Performance(PerformanceRequest request,
                                            std::optional<ModelSlot> model) const;

 private:
  struct HistoryKey {
    ModelSlot slot;
    PointId id;
    auto operator<=>(const HistoryKey&) const = default;
  };

  absl::StatusOr<std::shared_ptr<VersionedDataset>> RequireDataset() const;
  absl::StatusOr<std::vector<std::shared_ptr<const ModelHandle>>> SelectModels(
      std::optional<ModelSlot> model) const;
  void InvalidateRow(const std::vector<Value>& row) const;
  absl::StatusOr<SessionResult> RegisterHandle(
      ModelSlot slot, absl::StatusOr<std::shared_ptr<const Model>> model,
      std::string display_name, bool replace);

  const std::string id_;
  mutable absl::Mutex mu_;
  std::shared_ptr<VersionedDataset> dataset_ ABSL_GUARDED_BY(mu_);
  std::string dataset_name_ ABSL_GUARDED_BY(mu_);
  uint64_t retired_version_ ABSL_GUARDED_BY(mu_) = 0;
  ModelRegistry models_ ABSL_GUARDED_BY(mu_);
  SessionSettings settings_ ABSL_GUARDED_BY(mu_);
  std::map<HistoryKey, std::vector<PredictionOutput>> history_
      ABSL_GUARDED_BY(mu_);
};

}  // namespace whatif

#endif  // WHATIF_SERVICE_SESSION_H_
