#include "bvoc/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace bvoc::csv {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view token) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r'))
    token.remove_suffix(1);
  if (token == "inf" || token == "+inf") return HUGE_VAL;
  if (token == "-inf") return -HUGE_VAL;
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty())
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  return value;
}

const std::vector<double>& Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  throw std::out_of_range("missing column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Table read_table(std::istream& in, char sep) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto cells = split(stripped, sep);
    if (!have_header) {
      for (auto& c : cells) table.header.push_back(trim(c));
      table.columns.resize(table.header.size());
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " fields, got " +
                                  std::to_string(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        table.columns[i].push_back(parse_double(cells[i]));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ", column '" +
                                    table.header[i] + "': " + e.what());
      }
    }
  }
  if (!have_header) throw std::invalid_argument("empty table: no header line");
  return table;
}

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::span<const double>>& columns, char sep) {
  if (header.size() != columns.size())
    throw std::invalid_argument("write_table: header/column count mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw std::invalid_argument("write_table: ragged columns");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? std::string(1, sep) : "") << header[i];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out << sep;
      out << format_double(columns[i][r]);
    }
    out << '\n';
  }
}

char separator_for(std::string_view format) {
  if (format == "csv") return ',';
  if (format == "tsv") return '\t';
  throw std::invalid_argument("unknown format '" + std::string(format) + "' (expected csv|tsv)");
}

}  // namespace bvoc::csv
