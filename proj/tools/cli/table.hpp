// Copyright 2026 The gkpqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GKPQKD_TOOLS_CLI_TABLE_HPP_
#define GKPQKD_TOOLS_CLI_TABLE_HPP_

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace gkpqkd::cli {

inline constexpr const char* kSchemaVersion = "1.0";

using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

struct Column {
  std::string name;  // carries the unit suffix, e.g. L_B_km
  std::string unit;  // km, bits/use, snu, vac_half, 1, ...
};

// Rows of one command run. Every row holds a value for every column.
class Table {
 public:
  Table(std::string command, std::vector<Column> columns);

  const std::string& command() const { return command_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  // Appends a row given by column name. Missing names become null, unknown
  // names throw std::logic_error.
  void AddRow(const std::map<std::string, Cell>& values);

  // Run-level metadata copied to the JSON header (config echo, seed, ...).
  std::map<std::string, Cell>& meta() { return meta_; }
  const std::map<std::string, Cell>& meta() const { return meta_; }

  void WriteCsv(std::ostream& out) const;
  void WriteJson(std::ostream& out) const;

 private:
  std::string command_;
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::map<std::string, Cell> meta_;
};

// Shortest round-trip decimal form, locale independent.
std::string FormatDouble(double x);

}  // namespace gkpqkd::cli

#endif  // GKPQKD_TOOLS_CLI_TABLE_HPP_
