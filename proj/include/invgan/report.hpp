#pragma once

// Result tables (CSV) and static log-log SVG charts.

#include "invgan/fit.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace invgan {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// Plain comma-separated values; cells must not contain commas, quotes or
/// newlines (throws std::invalid_argument).
void write_csv(std::ostream& os, const Table& t);
/// Reads what write_csv writes. Throws std::invalid_argument on ragged rows.
Table read_csv(std::istream& is);

struct Series {
  std::string name;
  std::vector<double> x, y;
  std::optional<LinearFit> fit;  // in log-log coordinates
};

/// Minimal log-log chart: axes with decade ticks, one polyline with markers
/// per series, dashed fitted lines and a legend. Nonpositive points are
/// skipped.
std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series);

/// One row per named check, colored by outcome.
std::string status_svg(const std::string& title, const std::vector<std::pair<std::string, bool>>& checks);

}  // namespace invgan
