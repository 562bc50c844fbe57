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

#ifndef WHATIF_VALUE_H_
#define WHATIF_VALUE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace whatif {

// A single cell of a tabular dataset. std::monostate marks a missing value.
using Value = std::variant<std::monostate, double, std::string>;

// A view over one datapoint's values, in schema order.
using Row = std::span<const Value>;

inline bool IsMissing(const Value& v) {
  return std::holds_alternative<std::monostate>(v);
}
inline const double* AsNumber(const Value& v) { return std::get_if<double>(&v); }
inline const std::string* AsString(const Value& v) {
  return std::get_if<std::string>(&v);
}

enum class FeatureKind { kNumeric, kCategorical };

std::string_view FeatureKindName(FeatureKind kind);

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;

  bool operator==(const Feature&) const = default;
};

// Shortest decimal representation that round-trips, e.g. 10 -> "10",
// 0.1 -> "0.1".
std::string FormatNumber(double v);

// Human-readable rendering. Missing values render as "(missing)".
std::string ValueToString(const Value& v);

// Parses a finite decimal number, tolerating surrounding ASCII whitespace and
// a leading '+'. Returns nullopt for anything else, including inf and nan.
std::optional<double> ParseFiniteNumber(std::string_view text);

// Appends a canonical, collision-free byte encoding of `row` to `out`. Used
// as a content key for prediction caching.
void AppendCanonicalEncoding(Row row, std::string& out);

}  // namespace whatif

#endif  // WHATIF_VALUE_H_
