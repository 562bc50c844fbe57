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

#ifndef WHATIF_MODEL_H_
#define WHATIF_MODEL_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "whatif/value.h"

namespace whatif {

struct TaskKind {
  enum class Type { kBinary, kMulticlass, kRegression };

  Type type = Type::kBinary;
  // 2 for binary, >= 3 for multiclass, 1 for regression.
  int num_classes = 2;

  static TaskKind Binary() { return {Type::kBinary, 2}; }
  static TaskKind Multiclass(int num_classes) {
    return {Type::kMulticlass, num_classes};
  }
  static TaskKind Regression() { return {Type::kRegression, 1}; }

  bool is_binary() const { return type == Type::kBinary; }
  bool is_multiclass() const { return type == Type::kMulticlass; }
  bool is_regression() const { return type == Type::kRegression; }

  // Width of the model's score vector: 1 for binary and regression, k for
  // multiclass.
  int OutputWidth() const { return is_multiclass() ? num_classes : 1; }

  bool operator==(const TaskKind&) const = default;
};

// "binary", "multiclass:K" or "regression".
std::string TaskKindToString(const TaskKind& task);
absl::StatusOr<TaskKind> ParseTaskKind(std::string_view text);

// Scores for one datapoint.
//  - binary: one positive-class score in [0, 1];
//  - multiclass: k scores in [0, 1] summing to 1;
//  - regression: one finite value.
struct PredictionOutput {
  TaskKind task;
  std::vector<double> scores;

  // Positive-class score (binary) or predicted value (regression).
  double primary() const { return scores.front(); }
  int ArgmaxClass() const;

  bool operator==(const PredictionOutput&) const = default;
};

absl::Status ValidatePrediction(const PredictionOutput& output);

// Black-box predictor over rows laid out by `features`.
//
// Implementations must be safe to call concurrently and must return one
// output per row, in row order.
class Model {
 public:
  virtual ~Model() = default;

  virtual const TaskKind& task() const = 0;
  // "builtin" or the remote endpoint URL.
  virtual std::string backend() const = 0;

  virtual absl::StatusOr<std::vector<PredictionOutput>> PredictBatch(
      std::span<const Feature> features, std::span<const Row> rows) const = 0;
};

struct ScoreDelta {
  enum class Direction { kUp, kDown, kFlat };

  // after - before, componentwise.
  std::vector<double> delta;
  Direction direction = Direction::kFlat;
};

inline constexpr double kFlatDeltaTolerance = 1e-12;

std::string_view DirectionName(ScoreDelta::Direction direction);

// Change between two predictions for the same task. The direction follows
// the positive-class score (binary), the value (regression), or the score of
// the class that `before` ranked highest (multiclass); it is flat when that
// component moved by less than 1e-12.
absl::StatusOr<ScoreDelta> ComputeScoreDelta(const PredictionOutput& before,
                                             const PredictionOutput& after);

}  // namespace whatif

#endif  // WHATIF_MODEL_H_
