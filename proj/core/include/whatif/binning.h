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

#ifndef WHATIF_BINNING_H_
#define WHATIF_BINNING_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "whatif/dataset.h"

namespace whatif {

inline constexpr std::string_view kMissingBinLabel = "(missing)";

struct BinningSpec {
  std::optional<std::string> x_feature;
  std::optional<std::string> y_feature;
  size_t numeric_bin_count = 10;
  std::optional<std::string> color_feature;
};

// Per-point values supplied by the caller, keyed by field name and aligned
// with the dataset's point order. Used to lay points out by model-derived
// quantities (predicted class, correctness, error, score).
using ModelFields = std::map<std::string, std::vector<Value>, std::less<>>;

struct BinAxis {
  // Unset when the axis is not bound: every point falls in a single bin.
  std::optional<std::string> feature;
  std::vector<std::string> labels;
};

struct PointBins {
  PointId id = 0;
  size_t x_bin = 0;
  size_t y_bin = 0;
  // Empty when no color feature is set.
  std::string color_key;
};

struct BinLayout {
  BinAxis x;
  BinAxis y;
  std::vector<PointBins> points;
};

// Assigns every point to an (x, y) cell and a color key.
//
// Names resolve against model fields first, then schema features, then
// derived features. Numeric values are split into numeric_bin_count uniform
// bins over [min, max] of the observed values (the maximum lands in the last
// bin); categorical values get one bin each, sorted lexicographically. A
// trailing "(missing)" bin is added when any point lacks a value. Numeric
// color keys are the label of the value's bin.
absl::StatusOr<BinLayout> AssignBins(const Dataset& dataset,
                                     const BinningSpec& spec,
                                     const ModelFields& model_fields = {});

}  // namespace whatif

#endif  // WHATIF_BINNING_H_
