#include "invgan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace invgan {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("row width does not match the header");
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& os, const Table& t) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\"\n\r") != std::string::npos)
        throw std::invalid_argument("CSV cell contains a separator: " + cells[i]);
      os << (i ? "," : "") << cells[i];
    }
    os << '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
}

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  t.columns = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.columns.size()) throw std::invalid_argument("ragged CSV row: " + line);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series) {
  const double W = 640, H = 420, L = 70, R = 170, T = 40, B = 55;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] <= 0 || s.y[i] <= 0) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-9) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-9) ymin -= 0.5, ymax += 0.5;
  const double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
  xmin -= padx, xmax += padx, ymin -= pady, ymax += pady;
  auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (W - L - R) << "\" height=\"" << (H - T - B)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  // Ticks at 1, 2, 5 times powers of ten inside the range.
  for (int e = static_cast<int>(std::floor(std::min(xmin, ymin))) - 1; e <= static_cast<int>(std::ceil(std::max(xmax, ymax))) + 1; ++e) {
    for (int m : {1, 2, 5}) {
      const double lv = e + std::log10(static_cast<double>(m));
      char lab[32];
      std::snprintf(lab, sizeof lab, "%g", m * std::pow(10.0, e));
      if (lv >= xmin && lv <= xmax) {
        o << "<line x1=\"" << num(px(lv)) << "\" y1=\"" << (H - B) << "\" x2=\"" << num(px(lv)) << "\" y2=\"" << (H - B + 5) << "\" stroke=\"black\"/>";
        o << "<text x=\"" << num(px(lv)) << "\" y=\"" << (H - B + 18) << "\" text-anchor=\"middle\">" << lab << "</text>\n";
      }
      if (lv >= ymin && lv <= ymax) {
        o << "<line x1=\"" << (L - 5) << "\" y1=\"" << num(py(lv)) << "\" x2=\"" << L << "\" y2=\"" << num(py(lv)) << "\" stroke=\"black\"/>";
        o << "<text x=\"" << (L - 8) << "\" y=\"" << num(py(lv) + 4) << "\" text-anchor=\"end\">" << lab << "</text>\n";
      }
    }
  }
  o << "<text x=\"" << num(L + (W - L - R) / 2) << "\" y=\"" << (H - 12) << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  o << "<text transform=\"translate(16," << num(T + (H - T - B) / 2) << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    std::string pts;
    double fx0 = std::numeric_limits<double>::infinity(), fx1 = -fx0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] <= 0 || s.y[i] <= 0) continue;
      const double lx = std::log10(s.x[i]), ly = std::log10(s.y[i]);
      fx0 = std::min(fx0, lx);
      fx1 = std::max(fx1, lx);
      pts += num(px(lx)) + "," + num(py(ly)) + " ";
      o << "<circle cx=\"" << num(px(lx)) << "\" cy=\"" << num(py(ly)) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    }
    if (!pts.empty()) o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << col << "\"/>\n";
    if (s.fit && std::isfinite(fx0)) {
      // Fits are in natural logs; convert to log10 coordinates.
      auto fy = [&](double lx) { return (s.fit->slope * lx * std::log(10.0) + s.fit->intercept) / std::log(10.0); };
      o << "<line x1=\"" << num(px(fx0)) << "\" y1=\"" << num(py(fy(fx0))) << "\" x2=\"" << num(px(fx1)) << "\" y2=\""
        << num(py(fy(fx1))) << "\" stroke=\"" << col << "\" stroke-dasharray=\"5,4\"/>\n";
    }
    const double ly = T + 14 + 18 * static_cast<double>(k);
    o << "<rect x=\"" << (W - R + 12) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\"" << col << "\"/>";
    std::string label = s.name;
    if (s.fit) {
      char buf[48];
      std::snprintf(buf, sizeof buf, " (slope %.3f)", s.fit->slope);
      label += buf;
    }
    o << "<text x=\"" << (W - R + 28) << "\" y=\"" << num(ly) << "\">" << escape(label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string status_svg(const std::string& title, const std::vector<std::pair<std::string, bool>>& checks) {
  const double W = 520, row = 20, H = 50 + row * static_cast<double>(checks.size());
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"10\" y=\"22\" font-size=\"15\">" << escape(title) << "</text>\n";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const double y = 40 + row * static_cast<double>(i);
    o << "<rect x=\"10\" y=\"" << num(y) << "\" width=\"14\" height=\"14\" fill=\"" << (checks[i].second ? "#2ca02c" : "#d62728") << "\"/>";
    o << "<text x=\"32\" y=\"" << num(y + 11) << "\">" << escape(checks[i].first) << (checks[i].second ? "  pass" : "  FAIL") << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace invgan
