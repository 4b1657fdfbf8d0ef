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

#include "table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gkpqkd::cli {
namespace {

std::string CsvField(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return FormatDouble(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool x) const { return x ? "true" : "false"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json JsonValue(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double x) const {
      if (!std::isfinite(x)) return nullptr;
      return x;
    }
    nlohmann::ordered_json operator()(std::int64_t x) const { return x; }
    nlohmann::ordered_json operator()(bool x) const { return x; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Table::Table(std::string command, std::vector<Column> columns)
    : command_(std::move(command)), columns_(std::move(columns)) {}

void Table::AddRow(const std::map<std::string, Cell>& values) {
  std::vector<Cell> row(columns_.size());
  std::size_t used = 0;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto it = values.find(columns_[i].name);
    if (it != values.end()) {
      row[i] = it->second;
      ++used;
    }
  }
  if (used != values.size()) throw std::logic_error("row has a value for an unknown column");
  rows_.push_back(std::move(row));
}

void Table::WriteCsv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out << ',';
    out << columns_[i].name;
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << CsvField(row[i]);
    }
    out << '\n';
  }
}

void Table::WriteJson(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command_;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta_) meta[k] = JsonValue(v);
  doc["meta"] = meta;
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& c : columns_) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  doc["columns"] = cols;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[columns_[i].name] = JsonValue(row[i]);
    rows.push_back(std::move(r));
  }
  doc["rows"] = rows;
  out << doc.dump(2) << '\n';
}

}  // namespace gkpqkd::cli
