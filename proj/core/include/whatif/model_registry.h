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

#ifndef WHATIF_MODEL_REGISTRY_H_
#define WHATIF_MODEL_REGISTRY_H_

#include <array>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "whatif/builtin_model.h"
#include "whatif/dataset.h"
#include "whatif/model.h"
#include "whatif/remote_model.h"

namespace whatif {

enum class ModelSlot { kModel1 = 0, kModel2 = 1 };

inline constexpr size_t kMaxModels = 2;

// "model1" / "model2".
std::string_view SlotName(ModelSlot slot);
// Accepts "1", "2", "model1", "model2".
absl::StatusOr<ModelSlot> ParseSlot(std::string_view text);

// Content-keyed prediction memo. Safe for concurrent use; inserting an entry
// that is already present keeps the existing one.
class PredictionCache {
 public:
  std::optional<PredictionOutput> Find(const std::string& key) const;
  void Insert(std::string key, PredictionOutput output);
  void Erase(const std::string& key);
  void Clear();
  size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, PredictionOutput> entries_;
};

enum class CachePolicy { kUse, kBypass };

// A registered model plus its prediction cache.
class ModelHandle {
 public:
  ModelHandle(ModelSlot slot, std::string display_name,
              std::shared_ptr<const Model> model);

  ModelSlot slot() const { return slot_; }
  const std::string& display_name() const { return display_name_; }
  const TaskKind& task() const { return model_->task(); }
  std::string backend() const { return model_->backend(); }
  const Model& model() const { return *model_; }

  // Scores `rows` in order. With kUse, rows are looked up by content first
  // and only misses reach the model; results are identical either way.
  absl::StatusOr<std::vector<PredictionOutput>> PredictBatch(
      std::span<const Feature> features, std::span<const Row> rows,
      CachePolicy policy = CachePolicy::kUse) const;

  // Predictions for every point of `dataset`, in point order.
  absl::StatusOr<std::vector<PredictionOutput>> PredictDataset(
      const Dataset& dataset, CachePolicy policy = CachePolicy::kUse) const;

  // Drops the cache entry for a row's content.
  void Invalidate(Row row) const;
  void ClearCache() const { cache_->Clear(); }
  size_t cache_size() const { return cache_->size(); }

 private:
  ModelSlot slot_;
  std::string display_name_;
  std::shared_ptr<const Model> model_;
  std::unique_ptr<PredictionCache> cache_;
};

struct RemoteSource {
  std::string url;
  TaskKind task;
  RemoteOptions options;
};

using ModelSource = std::variant<BuiltinModelSpec, RemoteSource>;

absl::StatusOr<std::shared_ptr<const Model>> BuildModel(const ModelSource& source);

// Up to two models. Once a second model is registered every analysis runs in
// comparison mode. All registered models must share one task kind.
class ModelRegistry {
 public:
  absl::StatusOr<std::shared_ptr<const ModelHandle>> Register(
      ModelSlot slot, std::shared_ptr<const Model> model,
      std::string display_name);
  absl::StatusOr<std::shared_ptr<const ModelHandle>> Register(
      ModelSlot slot, const ModelSource& source, std::string display_name);
  absl::Status Unregister(ModelSlot slot);

  std::shared_ptr<const ModelHandle> Get(ModelSlot slot) const;
  absl::StatusOr<std::shared_ptr<const ModelHandle>> Require(ModelSlot slot) const;
  // Registered handles in slot order.
  std::vector<std::shared_ptr<const ModelHandle>> handles() const;

  bool empty() const { return handles().empty(); }
  bool comparison_mode() const { return handles().size() == kMaxModels; }
  std::optional<TaskKind> task() const;
  void ClearCaches() const;

 private:
  std::array<std::shared_ptr<const ModelHandle>, kMaxModels> slots_;
};

}  // namespace whatif

#endif  // WHATIF_MODEL_REGISTRY_H_
