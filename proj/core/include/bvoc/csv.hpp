#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bvoc::csv {

/// Shortest representation that round-trips to the same double. Infinities
/// are written as `inf`/`-inf`, NaN as `nan`.
std::string format_double(double value);

/// Parses a full token as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view token);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  /// Column by header name; throws std::out_of_range when absent.
  const std::vector<double>& column(std::string_view name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Reads a numeric table. Lines starting with '#' and blank lines are skipped;
/// the first remaining line is the header.
Table read_table(std::istream& in, char sep = ',');

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::span<const double>>& columns, char sep = ',');

char separator_for(std::string_view format);

}  // namespace bvoc::csv
