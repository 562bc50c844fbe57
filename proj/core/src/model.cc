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

#include "whatif/model.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/numbers.h"

namespace whatif {

std::string TaskKindToString(const TaskKind& task) {
  switch (task.type) {
    case TaskKind::Type::kBinary:
      return "binary";
    case TaskKind::Type::kMulticlass:
      return absl::StrCat("multiclass:", task.num_classes);
    case TaskKind::Type::kRegression:
      return "regression";
  }
  return "unknown";
}

absl::StatusOr<TaskKind> ParseTaskKind(std::string_view text) {
  if (text == "binary") return TaskKind::Binary();
  if (text == "regression") return TaskKind::Regression();
  constexpr std::string_view kPrefix = "multiclass:";
  if (text.substr(0, kPrefix.size()) == kPrefix) {
    int k = 0;
    const std::string count(text.substr(kPrefix.size()));
    if (absl::SimpleAtoi(count, &k) && k >= 3) return TaskKind::Multiclass(k);
    return absl::InvalidArgumentError(
        absl::StrCat("multiclass task needs at least 3 classes, got '", count,
                     "'"));
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown task '", std::string(text),
      "' (expected binary, multiclass:K or regression)"));
}

int PredictionOutput::ArgmaxClass() const {
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) -
                          scores.begin());
}

absl::Status ValidatePrediction(const PredictionOutput& output) {
  if (static_cast<int>(output.scores.size()) != output.task.OutputWidth()) {
    return absl::InvalidArgumentError(
        absl::StrCat("prediction has ", output.scores.size(),
                     " scores, task ", TaskKindToString(output.task),
                     " expects ", output.task.OutputWidth()));
  }
  double sum = 0.0;
  for (double s : output.scores) {
    if (!std::isfinite(s)) {
      return absl::InvalidArgumentError("prediction score is not finite");
    }
    if (!output.task.is_regression() && (s < 0.0 || s > 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("class score ", s, " outside [0, 1]"));
    }
    sum += s;
  }
  if (output.task.is_multiclass() && std::abs(sum - 1.0) > 1e-6) {
    return absl::InvalidArgumentError(
        absl::StrCat("multiclass scores sum to ", sum, ", expected 1"));
  }
  return absl::OkStatus();
}

std::string_view DirectionName(ScoreDelta::Direction direction) {
  switch (direction) {
    case ScoreDelta::Direction::kUp:
      return "up";
    case ScoreDelta::Direction::kDown:
      return "down";
    case ScoreDelta::Direction::kFlat:
      return "flat";
  }
  return "flat";
}

absl::StatusOr<ScoreDelta> ComputeScoreDelta(const PredictionOutput& before,
                                             const PredictionOutput& after) {
  if (!(before.task == after.task) ||
      before.scores.size() != after.scores.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot compare a ", TaskKindToString(before.task), " prediction with a ",
        TaskKindToString(after.task), " prediction"));
  }
  ScoreDelta out;
  out.delta.resize(before.scores.size());
  for (size_t i = 0; i < before.scores.size(); ++i) {
    out.delta[i] = after.scores[i] - before.scores[i];
  }
  const size_t lead =
      before.task.is_multiclass() ? static_cast<size_t>(before.ArgmaxClass()) : 0;
  const double d = out.delta[lead];
  if (std::abs(d) < kFlatDeltaTolerance) {
    out.direction = ScoreDelta::Direction::kFlat;
  } else {
    out.direction = d > 0 ? ScoreDelta::Direction::kUp
                          : ScoreDelta::Direction::kDown;
  }
  return out;
}

}  // namespace whatif
