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

#include "whatif/model_registry.h"

#include <mutex>

#include "absl/strings/str_cat.h"

namespace whatif {

std::string_view SlotName(ModelSlot slot) {
  return slot == ModelSlot::kModel1 ? "model1" : "model2";
}

absl::StatusOr<ModelSlot> ParseSlot(std::string_view text) {
  if (text == "1" || text == "model1") return ModelSlot::kModel1;
  if (text == "2" || text == "model2") return ModelSlot::kModel2;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown model slot '", std::string(text), "' (expected 1 or 2)"));
}

std::optional<PredictionOutput> PredictionCache::Find(
    const std::string& key) const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PredictionCache::Insert(std::string key, PredictionOutput output) {
  std::unique_lock<std::shared_mutex> lock(mu_);
  entries_.try_emplace(std::move(key), std::move(output));
}

void PredictionCache::Erase(const std::string& key) {
  std::unique_lock<std::shared_mutex> lock(mu_);
  entries_.erase(key);
}

void PredictionCache::Clear() {
  std::unique_lock<std::shared_mutex> lock(mu_);
  entries_.clear();
}

size_t PredictionCache::size() const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  return entries_.size();
}

ModelHandle::ModelHandle(ModelSlot slot, std::string display_name,
                         std::shared_ptr<const Model> model)
    : slot_(slot),
      display_name_(std::move(display_name)),
      model_(std::move(model)),
      cache_(std::make_unique<PredictionCache>()) {}

namespace {

std::string CacheKey(Row row) {
  std::string key;
  AppendCanonicalEncoding(row, key);
  return key;
}

}  // namespace

absl::StatusOr<std::vector<PredictionOutput>> ModelHandle::PredictBatch(
    std::span<const Feature> features, std::span<const Row> rows,
    CachePolicy policy) const {
  if (policy == CachePolicy::kBypass) {
    return model_->PredictBatch(features, rows);
  }
  std::vector<PredictionOutput> outputs(rows.size());
  std::vector<std::string> keys(rows.size());
  std::vector<size_t> misses;
  std::vector<Row> miss_rows;
  for (size_t i = 0; i < rows.size(); ++i) {
    keys[i] = CacheKey(rows[i]);
    if (std::optional<PredictionOutput> hit = cache_->Find(keys[i])) {
      outputs[i] = *std::move(hit);
    } else {
      misses.push_back(i);
      miss_rows.push_back(rows[i]);
    }
  }
  if (misses.empty()) return outputs;
  absl::StatusOr<std::vector<PredictionOutput>> fresh =
      model_->PredictBatch(features, miss_rows);
  if (!fresh.ok()) return fresh.status();
  if (fresh->size() != misses.size()) {
    return absl::InternalError("model returned the wrong number of outputs");
  }
  for (size_t j = 0; j < misses.size(); ++j) {
    outputs[misses[j]] = (*fresh)[j];
    cache_->Insert(std::move(keys[misses[j]]), std::move((*fresh)[j]));
  }
  return outputs;
}

absl::StatusOr<std::vector<PredictionOutput>> ModelHandle::PredictDataset(
    const Dataset& dataset, CachePolicy policy) const {
  std::vector<Row> rows = dataset.Rows();
  return PredictBatch(dataset.features(), rows, policy);
}

void ModelHandle::Invalidate(Row row) const { cache_->Erase(CacheKey(row)); }

absl::StatusOr<std::shared_ptr<const Model>> BuildModel(
    const ModelSource& source) {
  if (const auto* spec = std::get_if<BuiltinModelSpec>(&source)) {
    absl::StatusOr<std::unique_ptr<BuiltinModel>> model =
        BuiltinModel::Create(*spec);
    if (!model.ok()) return model.status();
    return std::shared_ptr<const Model>(*std::move(model));
  }
  const auto& remote = std::get<RemoteSource>(source);
  absl::StatusOr<std::unique_ptr<RemoteModel>> model =
      RemoteModel::Create(remote.url, remote.task, remote.options);
  if (!model.ok()) return model.status();
  return std::shared_ptr<const Model>(*std::move(model));
}

absl::StatusOr<std::shared_ptr<const ModelHandle>> ModelRegistry::Register(
    ModelSlot slot, std::shared_ptr<const Model> model,
    std::string display_name) {
  auto& entry = slots_[static_cast<size_t>(slot)];
  if (entry) {
    return absl::AlreadyExistsError(
        absl::StrCat("slot ", std::string(SlotName(slot)), " is already taken"));
  }
  if (std::optional<TaskKind> existing = task();
      existing && !(*existing == model->task())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "all models must share one task: registered ",
        TaskKindToString(*existing), ", new ", TaskKindToString(model->task())));
  }
  if (display_name.empty()) display_name = std::string(SlotName(slot));
  entry = std::make_shared<const ModelHandle>(slot, std::move(display_name),
                                              std::move(model));
  return entry;
}

absl::StatusOr<std::shared_ptr<const ModelHandle>> ModelRegistry::Register(
    ModelSlot slot, const ModelSource& source, std::string display_name) {
  if (slots_[static_cast<size_t>(slot)]) {
    return absl::AlreadyExistsError(
        absl::StrCat("slot ", std::string(SlotName(slot)), " is already taken"));
  }
  absl::StatusOr<std::shared_ptr<const Model>> model = BuildModel(source);
  if (!model.ok()) return model.status();
  return Register(slot, *std::move(model), std::move(display_name));
}

absl::Status ModelRegistry::Unregister(ModelSlot slot) {
  auto& entry = slots_[static_cast<size_t>(slot)];
  if (!entry) {
    return absl::NotFoundError(
        absl::StrCat("slot ", std::string(SlotName(slot)), " is empty"));
  }
  entry.reset();
  return absl::OkStatus();
}

std::shared_ptr<const ModelHandle> ModelRegistry::Get(ModelSlot slot) const {
  return slots_[static_cast<size_t>(slot)];
}

absl::StatusOr<std::shared_ptr<const ModelHandle>> ModelRegistry::Require(
    ModelSlot slot) const {
  if (auto handle = Get(slot)) return handle;
  return absl::FailedPreconditionError(absl::StrCat(
      "no model registered in slot ", std::string(SlotName(slot))));
}

std::vector<std::shared_ptr<const ModelHandle>> ModelRegistry::handles() const {
  std::vector<std::shared_ptr<const ModelHandle>> out;
  for (const auto& h : slots_) {
    if (h) out.push_back(h);
  }
  return out;
}

std::optional<TaskKind> ModelRegistry::task() const {
  for (const auto& h : slots_) {
    if (h) return h->task();
  }
  return std::nullopt;
}

void ModelRegistry::ClearCaches() const {
  for (const auto& h : slots_) {
    if (h) h->ClearCache();
  }
}

}  // namespace whatif
