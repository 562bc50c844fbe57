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

#ifndef WHATIF_INGEST_H_
#define WHATIF_INGEST_H_

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "whatif/dataset.h"

namespace whatif {

enum class DataFormat { kCsv, kJsonl };

// Parses a dataset from raw bytes.
//
// CSV follows RFC 4180: the first record is the header, fields may be quoted
// with '"' (doubled to escape), and an empty field is missing. A blank line is
// a record with a single empty field, so it is a missing value in a
// single-column file and is skipped otherwise.
//
// JSONL holds one JSON object per line; an absent key or null is missing.
// Columns are the union of keys in first-seen order. Blank lines are skipped.
//
// Without a declared schema a column is numeric iff every non-missing value
// parses as a finite decimal number, and categorical otherwise. A declared
// schema must name exactly the source's columns; its order becomes the schema
// order.
absl::StatusOr<Dataset> Ingest(
    std::string_view source, DataFormat format,
    const std::optional<std::vector<Feature>>& declared_schema = std::nullopt);

// Picks the format from the extension: ".jsonl"/".ndjson" is JSONL, anything
// else CSV.
DataFormat FormatFromPath(const std::filesystem::path& path);

absl::StatusOr<Dataset> IngestFile(
    const std::filesystem::path& path,
    std::optional<DataFormat> format = std::nullopt,
    const std::optional<std::vector<Feature>>& declared_schema = std::nullopt);

absl::StatusOr<std::string> ReadFileToString(const std::filesystem::path& path);

}  // namespace whatif

#endif  // WHATIF_INGEST_H_
