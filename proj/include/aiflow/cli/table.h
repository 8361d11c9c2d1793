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

#ifndef AIFLOW_CLI_TABLE_H_
#define AIFLOW_CLI_TABLE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aiflow::cli {

using Cell = std::variant<std::string, std::int64_t, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void AddRow(std::vector<Cell> row);  // must match the column count
};

// %.17g, enough to round-trip any double.
std::string FormatReal(double v);
std::string FormatCell(const Cell& cell);

// RFC-4180 with LF line endings; fields quoted only when needed.
std::string ToCsv(const Table& table);
// {"columns": [...], "rows": [[...], ...]} with numbers kept numeric.
std::string ToJson(const Table& table);

// Inverse of ToCsv; every cell comes back as a string. Malformed quoting or
// ragged rows raise schema-error naming `source`.
Table ParseCsv(std::string_view text, std::string_view source);

}  // namespace aiflow::cli

#endif  // AIFLOW_CLI_TABLE_H_
