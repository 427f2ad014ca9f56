#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "polymass/common.hpp"

namespace polymass {

/// Column-oriented report table serialized as CSV (header row, comma
/// separated, LF, doubles at 17 significant digits) or as a JSON object with
/// a "rows" array of per-row objects.
struct Table {
  using Cell = std::variant<double, long long, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw config_error("Table: row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline void write_csv(const Table& table, std::ostream& os) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ",";
      if (std::holds_alternative<double>(row[c]))
        os << format_g17(std::get<double>(row[c]));
      else if (std::holds_alternative<long long>(row[c]))
        os << std::get<long long>(row[c]);
      else
        os << std::get<std::string>(row[c]);
    }
    os << "\n";
  }
}

inline void write_json(const Table& table, std::ostream& os) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::holds_alternative<double>(row[c]))
        obj[table.columns[c]] = std::get<double>(row[c]);
      else if (std::holds_alternative<long long>(row[c]))
        obj[table.columns[c]] = std::get<long long>(row[c]);
      else
        obj[table.columns[c]] = std::get<std::string>(row[c]);
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::json out;
  out["rows"] = std::move(rows);
  os << out.dump(2) << "\n";
}

}  // namespace polymass
