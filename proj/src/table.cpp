#include "ldp/table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ldp/types.hpp"

namespace ldp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& cell) {
  if (cell == "nan") return std::nan("");
  if (cell == "inf") return HUGE_VAL;
  if (cell == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error("not a number: '" + cell + "'");
  }
  return v;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) {
    throw Error("table row has " + std::to_string(row.size()) +
                " cells, header has " + std::to_string(header.size()));
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& column) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) return i;
  }
  throw Error("no column '" + column + "'");
}

const std::string& Table::cell(std::size_t row, const std::string& column) const {
  return rows.at(row).at(column_index(column));
}

double Table::number(std::size_t row, const std::string& column) const {
  return parse_double(cell(row, column));
}

namespace {

void write_line(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    if (cells[i].find_first_of(",\"\n") != std::string::npos) {
      os << '"';
      for (char c : cells[i]) {
        if (c == '"') os << '"';
        os << c;
      }
      os << '"';
    } else {
      os << cells[i];
    }
  }
  os << '\n';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

}  // namespace

void write_csv(std::ostream& os, const Table& table) {
  write_line(os, table.header);
  for (const auto& row : table.rows) write_line(os, row);
}

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw Error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split_line(line);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    t.add_row(split_line(line));
  }
  return t;
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& c = row[i];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (!c.empty() && ec == std::errc() && ptr == c.data() + c.size() &&
          std::isfinite(v)) {
        rec[table.header[i]] = v;
      } else {
        rec[table.header[i]] = c;
      }
    }
    records.push_back(std::move(rec));
  }
  return records.dump(2) + "\n";
}

}  // namespace ldp
