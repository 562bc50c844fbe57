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

#include "whatif/versioned_dataset.h"

namespace whatif {

VersionedDataset::VersionedDataset(Dataset initial, uint64_t initial_version) {
  current_.version = initial_version;
  current_.dataset = std::make_shared<const Dataset>(std::move(initial));
}

DatasetSnapshot VersionedDataset::Snapshot() const {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  return current_;
}

DatasetSnapshot VersionedDataset::Publish(std::shared_ptr<const Dataset> next) {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  current_.version += 1;
  current_.dataset = std::move(next);
  return current_;
}

absl::StatusOr<std::pair<DatasetSnapshot, DataPoint>> VersionedDataset::Edit(
    PointId id, const FeatureChanges& changes) {
  return Mutate<DataPoint>(
      [&](Dataset& ds) { return ds.Edit(id, changes); });
}

absl::StatusOr<std::pair<DatasetSnapshot, DataPoint>>
VersionedDataset::Duplicate(PointId id) {
  return Mutate<DataPoint>([&](Dataset& ds) { return ds.Duplicate(id); });
}

absl::StatusOr<DatasetSnapshot> VersionedDataset::Delete(PointId id) {
  auto result = Mutate<bool>([&](Dataset& ds) -> absl::StatusOr<bool> {
    absl::Status s = ds.Delete(id);
    if (!s.ok()) return s;
    return true;
  });
  if (!result.ok()) return result.status();
  return result->first;
}

}  // namespace whatif
