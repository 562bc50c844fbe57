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

#ifndef WHATIF_SERVICE_PARAMS_H_
#define WHATIF_SERVICE_PARAMS_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "whatif/service/session.h"

namespace whatif {

// Request parameters by name, as found in a query string or given as CLI
// flags. Lists are comma separated.
using Params = std::map<std::string, std::string, std::less<>>;

// Flattens a JSON object into Params: strings as-is, numbers in shortest
// form, booleans as "true"/"false", arrays of scalars comma-joined.
absl::StatusOr<Params> ParamsFromJson(const nlohmann::json& body);

std::optional<std::string> GetParam(const Params& params, std::string_view name);
absl::StatusOr<std::optional<uint64_t>> GetUintParam(const Params& params,
                                                     std::string_view name);
absl::StatusOr<std::optional<double>> GetNumberParam(const Params& params,
                                                     std::string_view name);
// "1", "true", "yes" or an empty value are true; "0", "false", "no" false.
absl::StatusOr<bool> GetFlagParam(const Params& params, std::string_view name);
absl::StatusOr<std::optional<ModelSlot>> GetSlotParam(const Params& params,
                                                      std::string_view name);

// x, y, color, bins, label, positive.
absl::StatusOr<BinsQuery> ParseBinsQuery(const Params& params,
                                         const SessionSettings& settings);
// point, norm, model, threshold, margin.
absl::StatusOr<CounterfactualQuery> ParseCounterfactualQuery(
    const Params& params);
// feature, point or global, range ("lo:hi"), num_points, values, top_n,
// model.
absl::StatusOr<PdpQuery> ParsePdpQuery(const Params& params);
// label, positive, classes, slice_by, bins, threshold, thresholds (a JSON
// object of slice key -> threshold), cost_ratio, strategy, epsilon, sort.
absl::StatusOr<PerformanceRequest> ParsePerformanceRequest(
    const Params& params, const SessionSettings& settings);

}  // namespace whatif

#endif  // WHATIF_SERVICE_PARAMS_H_
