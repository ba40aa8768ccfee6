#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldp {

/// Shortest decimal form that still carries 17 significant digits.
std::string format_double(double v);

/// Parses a cell written by format_double (also accepts inf / nan).
double parse_double(const std::string& cell);

/// A header plus string cells; the common currency of every CSV/JSON
/// artifact the toolkit emits.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);

  double number(std::size_t row, const std::string& column) const;
  const std::string& cell(std::size_t row, const std::string& column) const;
  std::size_t column_index(const std::string& column) const;

  friend bool operator==(const Table&, const Table&) = default;
};

void write_csv(std::ostream& os, const Table& table);
Table read_csv(std::istream& is);

/// Rows as an array of records; numeric-looking cells become numbers.
std::string to_json(const Table& table);

}  // namespace ldp
