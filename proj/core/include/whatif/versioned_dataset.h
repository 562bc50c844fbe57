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

#ifndef WHATIF_VERSIONED_DATASET_H_
#define WHATIF_VERSIONED_DATASET_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>

#include "absl/status/statusor.h"
#include "whatif/dataset.h"

namespace whatif {

struct DatasetSnapshot {
  uint64_t version = 0;
  std::shared_ptr<const Dataset> dataset;
};

// Single-writer, many-reader holder of dataset snapshots.
//
// Readers grab an immutable snapshot and keep it as long as they like.
// Mutations are serialized: each one copies the current snapshot, applies the
// change and publishes the result under the next version. A failed mutation
// publishes nothing.
class VersionedDataset {
 public:
  explicit VersionedDataset(Dataset initial, uint64_t initial_version = 0);

  DatasetSnapshot Snapshot() const;

  // Runs `mutate` against a private copy of the latest snapshot.
  template <typename T>
  absl::StatusOr<std::pair<DatasetSnapshot, T>> Mutate(
      const std::function<absl::StatusOr<T>(Dataset&)>& mutate) {
    std::lock_guard<std::mutex> writer(writer_mu_);
    auto next = std::make_shared<Dataset>(*Snapshot().dataset);
    absl::StatusOr<T> result = mutate(*next);
    if (!result.ok()) return result.status();
    DatasetSnapshot published = Publish(std::move(next));
    return std::make_pair(std::move(published), *std::move(result));
  }

  absl::StatusOr<std::pair<DatasetSnapshot, DataPoint>> Edit(
      PointId id, const FeatureChanges& changes);
  absl::StatusOr<std::pair<DatasetSnapshot, DataPoint>> Duplicate(PointId id);
  absl::StatusOr<DatasetSnapshot> Delete(PointId id);

 private:
  DatasetSnapshot Publish(std::shared_ptr<const Dataset> next);

  std::mutex writer_mu_;
  mutable std::mutex snapshot_mu_;
  DatasetSnapshot current_;
};

}  // namespace whatif

#endif  // WHATIF_VERSIONED_DATASET_H_
