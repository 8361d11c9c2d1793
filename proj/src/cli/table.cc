// Copyright 2026 The AIFlow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aiflow/cli/table.h"

#include <cstdio>

#include "aiflow/error.h"
#include "json.hpp"

namespace aiflow::cli {

void Table::AddRow(std::vector<Cell> row) {
  Require(row.size() == columns.size(), ErrorCode::kInternal,
          "row has " + std::to_string(row.size()) + " cells for " + std::to_string(columns.size()) +
              " columns");
  rows.push_back(std::move(row));
}

std::string FormatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string FormatCell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return FormatReal(std::get<double>(cell));
}

namespace {

std::string Quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void AppendLine(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += Quote(fields[i]);
  }
  out += '\n';
}

}  // namespace

std::string ToCsv(const Table& table) {
  std::string out;
  AppendLine(out, table.columns);
  for (const auto& row : table.rows) {
    std::vector<std::string> fields;
    for (const Cell& c : row) fields.push_back(FormatCell(c));
    AppendLine(out, fields);
  }
  return out;
}

std::string ToJson(const Table& table) {
  nlohmann::ordered_json doc;
  doc["columns"] = table.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const Cell& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

Table ParseCsv(std::string_view text, std::string_view source) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  auto bad = [&](const std::string& what) {
    Fail(ErrorCode::kSchemaError, std::string(source) + ":" + std::to_string(line) + ": " + what);
  };
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      if (field_started) bad("quote inside an unquoted field");
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_field();
      records.push_back(std::move(record));
      record.clear();
      ++line;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) bad("unterminated quoted field");
  if (field_started || !record.empty()) {
    end_field();
    records.push_back(std::move(record));
  }
  if (records.empty()) bad("no header row");
  Table t;
  t.columns = records.front();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.columns.size()) {
      line = r + 1;
      bad("row has " + std::to_string(records[r].size()) + " fields, header has " +
          std::to_string(t.columns.size()));
    }
    std::vector<Cell> row(records[r].begin(), records[r].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace aiflow::cli
