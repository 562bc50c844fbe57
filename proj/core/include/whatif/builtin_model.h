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

#ifndef WHATIF_BUILTIN_MODEL_H_
#define WHATIF_BUILTIN_MODEL_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "whatif/model.h"

namespace whatif {

enum class Activation { kRelu, kIdentity };
enum class OutputTransform { kSigmoid, kSoftmax, kIdentity };

struct DenseLayer {
  // Row-major, one row per output unit: weights[out][in].
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  Activation activation = Activation::kIdentity;
};

struct Standardization {
  double mean = 0.0;
  double std = 1.0;
};

// Portable weights document for a deterministic feed-forward model.
//
// Inputs are encoded in feature_order: numeric features as (x - mean) / std
// (missing -> 0, i.e. the mean), categorical features as a one-hot over the
// vocabulary (unseen or missing -> all zeros).
struct BuiltinModelSpec {
  TaskKind task;
  std::vector<std::string> feature_order;
  std::map<std::string, Standardization> numeric_standardization;
  std::map<std::string, std::vector<std::string>> categorical_vocab;
  std::vector<DenseLayer> layers;
  OutputTransform output = OutputTransform::kSigmoid;

  size_t EncodedWidth() const;
};

// Checks the dimension chain from encoded input width to the task's output
// width, finiteness of every parameter, and that the output transform
// matches the task.
absl::Status ValidateBuiltinModelSpec(const BuiltinModelSpec& spec);

// JSON document with exactly the BuiltinModelSpec fields:
//   {"task": "binary", "feature_order": [...],
//    "numeric_standardization": {"f": {"mean": m, "std": s}},
//    "categorical_vocab": {"g": ["a", "b"]},
//    "layers": [{"weights": [[...]], "bias": [...], "activation": "relu"}],
//    "output": "sigmoid"}
absl::StatusOr<BuiltinModelSpec> ParseBuiltinModelSpec(const nlohmann::json& doc);
absl::StatusOr<BuiltinModelSpec> ParseBuiltinModelSpecText(std::string_view text);
nlohmann::json BuiltinModelSpecToJson(const BuiltinModelSpec& spec);

class BuiltinModel final : public Model {
 public:
  static absl::StatusOr<std::unique_ptr<BuiltinModel>> Create(
      BuiltinModelSpec spec);

  const TaskKind& task() const override { return spec_.task; }
  std::string backend() const override { return "builtin"; }
  const BuiltinModelSpec& spec() const { return spec_; }

  absl::StatusOr<std::vector<PredictionOutput>> PredictBatch(
      std::span<const Feature> features,
      std::span<const Row> rows) const override;

 private:
  explicit BuiltinModel(BuiltinModelSpec spec) : spec_(std::move(spec)) {}

  BuiltinModelSpec spec_;
};

}  // namespace whatif

#endif  // WHATIF_BUILTIN_MODEL_H_
