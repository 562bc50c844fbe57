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

#include "whatif/value.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>

namespace whatif {

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kNumeric:
      return "numeric";
    case FeatureKind::kCategorical:
      return "categorical";
  }
  return "unknown";
}

std::string FormatNumber(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string ValueToString(const Value& v) {
  if (const double* d = AsNumber(v)) return FormatNumber(*d);
  if (const std::string* s = AsString(v)) return *s;
  return "(missing)";
}

std::optional<double> ParseFiniteNumber(std::string_view text) {
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(out)) return std::nullopt;
  return out;
}

void AppendCanonicalEncoding(Row row, std::string& out) {
  for (const Value& v : row) {
    if (const double* d = AsNumber(v)) {
      out.push_back('d');
      char bytes[sizeof(double)];
      // Normalize -0.0 so that equal numbers share a key.
      const double x = (*d == 0.0) ? 0.0 : *d;
      std::memcpy(bytes, &x, sizeof(double));
      out.append(bytes, sizeof(double));
    } else if (const std::string* s = AsString(v)) {
      out.push_back('s');
      const uint64_t n = s->size();
      char len[sizeof(uint64_t)];
      std::memcpy(len, &n, sizeof(uint64_t));
      out.append(len, sizeof(uint64_t));
      out.append(*s);
    } else {
      out.push_back('m');
    }
  }
}

}  // namespace whatif
