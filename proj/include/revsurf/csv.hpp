#pragma once

// Numeric CSV with a header row.

#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "revsurf/error.hpp"

namespace revsurf {

struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Reads a header line and rows of finite numbers. Blank lines and lines
/// starting with `#` are skipped.
inline NumericTable read_numeric_csv(std::istream& in) {
  NumericTable table;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = detail::trim(line);
    if (text.empty() || text[0] == '#') continue;
    auto fields = detail::split_fields(text);
    if (!have_header) {
      for (const auto& f : fields)
        if (f.empty()) throw ParseError("empty column name in header", lineno);
      table.header = std::move(fields);
      table.columns.resize(table.header.size());
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       lineno);
    for (std::size_t k = 0; k < fields.size(); ++k) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(fields[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != fields[k].size() || !std::isfinite(v))
        throw ParseError("not a finite number: '" + fields[k] + "'", lineno);
      table.columns[k].push_back(v);
    }
  }
  if (!have_header) throw ParseError("missing header", 0);
  return table;
}

}  // namespace revsurf
