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

#ifndef WHATIF_REMOTE_MODEL_H_
#define WHATIF_REMOTE_MODEL_H_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "whatif/model.h"

namespace whatif {

struct RemoteEndpoint {
  std::string host;
  int port = 80;
  std::string path = "/";

  // Accepts "http://host[:port][/path]".
  static absl::StatusOr<RemoteEndpoint> Parse(std::string_view url);
  std::string ToString() const;
};

struct RemoteOptions {
  // Concurrent requests per PredictBatch call.
  size_t max_in_flight = 8;
  // Instances per request.
  size_t batch_size = 64;
  std::chrono::milliseconds timeout{10000};
};

// Request body: {"instances": [{"feature": value, ...}, ...]}. Missing values
// are sent as null.
nlohmann::json EncodeInstances(std::span<const Feature> features,
                               std::span<const Row> rows);

// Decodes {"predictions": [...]} with one entry per instance: a number for
// binary and regression tasks, or a score list for multiclass.
absl::StatusOr<std::vector<PredictionOutput>> DecodePredictions(
    const TaskKind& task, const nlohmann::json& body, size_t expected);

// Model served over HTTP. Transport failures and non-2xx replies surface as
// UNAVAILABLE (retriable) with the HTTP status in the message; bodies that do
// not follow the protocol surface as DATA_LOSS.
class RemoteModel final : public Model {
 public:
  static absl::StatusOr<std::unique_ptr<RemoteModel>> Create(
      std::string_view url, TaskKind task, RemoteOptions options = {});

  const TaskKind& task() const override { return task_; }
  std::string backend() const override { return endpoint_.ToString(); }
  const RemoteOptions& options() const { return options_; }

  absl::StatusOr<std::vector<PredictionOutput>> PredictBatch(
      std::span<const Feature> features,
      std::span<const Row> rows) const override;

 private:
  RemoteModel(RemoteEndpoint endpoint, TaskKind task, RemoteOptions options)
      : endpoint_(std::move(endpoint)), task_(task), options_(options) {}

  absl::StatusOr<std::vector<PredictionOutput>> PostChunk(
      std::span<const Feature> features, std::span<const Row> rows) const;

  RemoteEndpoint endpoint_;
  TaskKind task_;
  RemoteOptions options_;
};

}  // namespace whatif

#endif  // WHATIF_REMOTE_MODEL_H_
