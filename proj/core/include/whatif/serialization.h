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

#ifndef WHATIF_SERIALIZATION_H_
#define WHATIF_SERIALIZATION_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "whatif/binning.h"
#include "whatif/counterfactual.h"
#include "whatif/dataset.h"
#include "whatif/model.h"
#include "whatif/model_registry.h"
#include "whatif/pdp.h"
#include "whatif/performance.h"
#include "whatif/statistics.h"

namespace whatif {

// Key order is part of the output format: the CLI and the HTTP service emit
// the same bytes for the same result.
using Json = nlohmann::ordered_json;

// Two-space indented JSON plus a trailing newline.
std::string RenderJson(const Json& doc);

Json ToJson(const Value& value);
// Null -> missing, number -> number, string -> string. Booleans become
// "true"/"false"; arrays and objects are rejected.
absl::StatusOr<Value> ValueFromJson(const nlohmann::json& j);

// {"num_points", "sort", "order", "features": {name: {...}}}
Json StatisticsToJson(const Dataset& dataset, FeatureSortKey sort);
Json ToJson(const FeatureStatistics& stats);
std::string_view SortKeyName(FeatureSortKey key);
// "non-uniformity", "missing" and "alpha" (long forms accepted).
absl::StatusOr<FeatureSortKey> ParseSortKey(std::string_view text);

Json ToJson(const Dataset& dataset, const DataPoint& point);
Json PointsPageToJson(const Dataset& dataset, size_t offset, size_t limit);
Json SchemaToJson(const Dataset& dataset);

Json ToJson(const BinLayout& layout);
Json ToJson(const PredictionOutput& output);
Json ToJson(const ScoreDelta& delta);
Json ToJson(const ModelHandle& model);
Json ToJson(const CounterfactualResult& result);
Json ToJson(const PdpCurve& curve);
Json ToJson(const ConfusionMatrix& m);
Json ToJson(const RocCurve& roc);
Json ToJson(const SliceMetrics& slice);
Json ToJson(const PerformanceReport& report);

// {"code": "INVALID_ARGUMENT", "message": ...}
Json ErrorToJson(const absl::Status& status);

}  // namespace whatif

#endif  // WHATIF_SERIALIZATION_H_
