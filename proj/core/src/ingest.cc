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

#include "whatif/ingest.h"

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace whatif {
namespace {

// Column-major staging area shared by both readers.
struct RawTable {
  std::vector<std::string> names;
  std::vector<std::vector<Value>> columns;
  size_t rows = 0;
};

class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {}

  // Reads the next record into `fields`. Returns false at end of input.
  absl::StatusOr<bool> Next(std::vector<std::string>& fields,
                            size_t record_index) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (in_quotes) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          in_quotes = false;
          ++pos_;
          continue;
        }
        field.push_back(c);
        ++pos_;
        continue;
      }
      if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        ++pos_;
        continue;
      }
      if (c == '\r' || c == '\n') {
        ++pos_;
        if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        fields.push_back(std::move(field));
        return true;
      }
      if (c == '"') {
        if (!field.empty() || was_quoted) {
          return Malformed(record_index, fields.size(),
                           "unexpected quote inside unquoted field");
        }
        in_quotes = true;
        was_quoted = true;
        ++pos_;
        continue;
      }
      if (was_quoted) {
        return Malformed(record_index, fields.size(),
                         "unexpected character after closing quote");
      }
      field.push_back(c);
      ++pos_;
    }
    if (in_quotes) {
      return Malformed(record_index, fields.size(), "unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return true;
  }

 private:
  static absl::Status Malformed(size_t record_index, size_t column,
                                const std::string& what) {
    // Record 0 is the header.
    if (record_index == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("header, column ", column, ": ", what));
    }
    return absl::InvalidArgumentError(absl::StrCat(
        "row ", record_index - 1, ", column ", column, ": ", what));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

absl::StatusOr<RawTable> ReadCsv(std::string_view text) {
  RawTable table;
  CsvReader reader(text);
  std::vector<std::string> fields;
  absl::StatusOr<bool> more = reader.Next(fields, 0);
  if (!more.ok()) return more.status();
  if (!*more || (fields.size() == 1 && fields[0].empty())) {
    return absl::InvalidArgumentError("empty input: no header row");
  }
  table.names = fields;
  table.columns.resize(table.names.size());
  const size_t width = table.names.size();
  for (size_t record = 1;; ++record) {
    more = reader.Next(fields, record);
    if (!more.ok()) return more.status();
    if (!*more) break;
    const bool blank = fields.size() == 1 && fields[0].empty();
    if (blank && width > 1) continue;
    if (fields.size() != width) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", table.rows, ", column ", fields.size() - 1,
                       ": record has ", fields.size(), " fields, expected ",
                       width));
    }
    for (size_t c = 0; c < width; ++c) {
      if (fields[c].empty()) {
        table.columns[c].emplace_back(std::monostate{});
      } else {
        table.columns[c].emplace_back(std::move(fields[c]));
      }
    }
    ++table.rows;
  }
  return table;
}

absl::StatusOr<RawTable> ReadJsonl(std::string_view text) {
  RawTable table;
  std::unordered_map<std::string, size_t> column_of;
  size_t line_start = 0;
  size_t line_number = 0;
  while (line_start < text.size()) {
    size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    line_start = line_end + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const size_t row = table.rows;
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", row, " (line ", line_number, "), column ", e.byte,
          ": malformed JSON: ", e.what()));
    }
    if (!object.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", row, " (line ", line_number,
                       "), column 0: expected a JSON object"));
    }
    for (auto it = object.begin(); it != object.end(); ++it) {
      auto [slot, inserted] = column_of.try_emplace(it.key(), table.names.size());
      if (inserted) {
        table.names.push_back(it.key());
        table.columns.emplace_back(row, Value{});
      }
      std::vector<Value>& column = table.columns[slot->second];
      const nlohmann::json& v = it.value();
      if (v.is_null()) {
        column.emplace_back(std::monostate{});
      } else if (v.is_number()) {
        column.emplace_back(v.get<double>());
      } else if (v.is_string()) {
        column.emplace_back(v.get<std::string>());
      } else if (v.is_boolean()) {
        column.emplace_back(std::string(v.get<bool>() ? "true" : "false"));
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", row, " (line ", line_number, "), column '",
                         it.key(), "': nested values are not supported"));
      }
    }
    ++table.rows;
    for (auto& column : table.columns) {
      if (column.size() < table.rows) column.emplace_back(std::monostate{});
    }
  }
  if (table.rows == 0) {
    return absl::InvalidArgumentError("empty input: no JSON objects");
  }
  return table;
}

bool ColumnIsNumeric(const std::vector<Value>& column) {
  for (const Value& v : column) {
    if (IsMissing(v) || AsNumber(v)) continue;
    if (!ParseFiniteNumber(*AsString(v))) return false;
  }
  return true;
}

absl::Status ConvertColumn(std::vector<Value>& column, FeatureKind kind,
                           const std::string& name) {
  for (size_t r = 0; r < column.size(); ++r) {
    Value& v = column[r];
    if (IsMissing(v)) continue;
    if (kind == FeatureKind::kNumeric) {
      if (AsNumber(v)) continue;
      std::optional<double> parsed = ParseFiniteNumber(*AsString(v));
      if (!parsed) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", r, ", column '", name, "': '", *AsString(v),
                         "' is not a finite number"));
      }
      v = *parsed;
    } else if (const double* d = AsNumber(v)) {
      v = FormatNumber(*d);
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Dataset> Ingest(
    std::string_view source, DataFormat format,
    const std::optional<std::vector<Feature>>& declared_schema) {
  if (source.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return absl::InvalidArgumentError("empty input");
  }
  absl::StatusOr<RawTable> raw =
      format == DataFormat::kCsv ? ReadCsv(source) : ReadJsonl(source);
  if (!raw.ok()) return raw.status();

  std::vector<Feature> features;
  std::vector<size_t> source_column;
  if (declared_schema) {
    if (declared_schema->size() != raw->names.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("declared schema has ", declared_schema->size(),
                       " features but the source has ", raw->names.size(),
                       " columns"));
    }
    for (const Feature& f : *declared_schema) {
      size_t found = raw->names.size();
      for (size_t c = 0; c < raw->names.size(); ++c) {
        if (raw->names[c] == f.name) found = c;
      }
      if (found == raw->names.size()) {
        return absl::InvalidArgumentError(
            absl::StrCat("declared feature '", f.name, "' not in source"));
      }
      features.push_back(f);
      source_column.push_back(found);
    }
  } else {
    for (size_t c = 0; c < raw->names.size(); ++c) {
      features.push_back(Feature{raw->names[c],
                                 ColumnIsNumeric(raw->columns[c])
                                     ? FeatureKind::kNumeric
                                     : FeatureKind::kCategorical});
      source_column.push_back(c);
    }
  }

  for (size_t f = 0; f < features.size(); ++f) {
    absl::Status s = ConvertColumn(raw->columns[source_column[f]],
                                   features[f].kind, features[f].name);
    if (!s.ok()) return s;
  }

  std::vector<std::vector<Value>> rows(raw->rows);
  for (size_t r = 0; r < raw->rows; ++r) {
    rows[r].reserve(features.size());
    for (size_t f = 0; f < features.size(); ++f) {
      rows[r].push_back(std::move(raw->columns[source_column[f]][r]));
    }
  }
  raw->columns.clear();
  return Dataset::Create(std::move(features), std::move(rows));
}

DataFormat FormatFromPath(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return DataFormat::kJsonl;
  return DataFormat::kCsv;
}

absl::StatusOr<std::string> ReadFileToString(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open '", path.string(), "'"));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    return absl::DataLossError(absl::StrCat("error reading '", path.string(), "'"));
  }
  return buffer.str();
}

absl::StatusOr<Dataset> IngestFile(
    const std::filesystem::path& path, std::optional<DataFormat> format,
    const std::optional<std::vector<Feature>>& declared_schema) {
  absl::StatusOr<std::string> bytes = ReadFileToString(path);
  if (!bytes.ok()) return bytes.status();
  return Ingest(*bytes, format.value_or(FormatFromPath(path)), declared_schema);
}

}  // namespace whatif
