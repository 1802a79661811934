// Copyright 2026 hkbec contributors
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

#pragma once

// Tabular results with deterministic CSV and JSON export.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hkbec/errors.hpp"

namespace hkbec {

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  ResultTable& add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw ValidationError("result table: row has " + std::to_string(row.size()) + " cells, expected " +
                            std::to_string(columns.size()));
    rows.push_back(std::move(row));
    return *this;
  }
  bool empty() const { return rows.empty() || columns.empty(); }
};

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ValidationError("format: expected 'csv' or 'json', got '" + s + "'");
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& c, OutputFormat f) {
  struct V {
    OutputFormat f;
    std::string operator()(double v) const {
      if (f == OutputFormat::json && !std::isfinite(v)) return "null";
      return format_double(v);
    }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      return f == OutputFormat::json ? json_string(s) : csv_field(s);
    }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(V{f}, c);
}

}  // namespace detail

inline void write_table(std::ostream& out, const ResultTable& t, OutputFormat f) {
  if (t.empty()) throw ValidationError("export: result table is empty");
  if (f == OutputFormat::csv) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << detail::csv_field(t.columns[j]);
    out << "\n";
    for (const auto& r : t.rows) {
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << detail::cell_text(r[j], f);
      out << "\n";
    }
    return;
  }
  out << "[\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out << "  {";
    for (std::size_t j = 0; j < t.columns.size(); ++j)
      out << (j ? ", " : "") << detail::json_string(t.columns[j]) << ": " << detail::cell_text(t.rows[i][j], f);
    out << (i + 1 < t.rows.size() ? "},\n" : "}\n");
  }
  out << "]\n";
}

inline std::string table_to_string(const ResultTable& t, OutputFormat f) {
  std::ostringstream os;
  write_table(os, t, f);
  return os.str();
}

// No file is created for an empty table.
inline void export_table(const ResultTable& t, OutputFormat f, const std::string& path) {
  const std::string text = table_to_string(t, f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("export: cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ResourceError("export: write to '" + path + "' failed");
}

}  // namespace hkbec
