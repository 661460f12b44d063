#pragma once

// Sweep grids and the tabular result they produce, with CSV and SVG writers.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qdcqed/cli/config.hpp"
#include "qdcqed/errors.hpp"

namespace qdcqed::cli {

struct SweepRange {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  Spacing spacing = Spacing::linear;
};

inline SweepRange validate(const SweepRange& r) {
  if (r.count < 2) throw ConfigError(fmt::format("sweep count must be >= 2, got {}", r.count));
  if (!(r.min < r.max)) {
    throw ConfigError(fmt::format("sweep min ({}) must be below max ({})", r.min, r.max));
  }
  if (r.spacing == Spacing::log && !(r.min > 0.0)) {
    throw ConfigError("log spacing requires min > 0");
  }
  return r;
}

/// Grid points; both endpoints are reproduced exactly.
inline std::vector<double> grid(const SweepRange& range) {
  const auto r = validate(range);
  std::vector<double> out(static_cast<std::size_t>(r.count));
  const double last = r.count - 1;
  for (int i = 0; i < r.count; ++i) {
    const double f = i / last;
    out[i] = r.spacing == Spacing::linear
                 ? r.min + f * (r.max - r.min)
                 : std::exp(std::log(r.min) + f * (std::log(r.max) - std::log(r.min)));
  }
  out.front() = r.min;
  out.back() = r.max;
  return out;
}

struct SweepResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> provenance;  ///< written as "# " lines
  std::size_t skipped = 0;
  std::vector<std::string> warnings;

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(j));
    return out;
  }

  std::size_t index_of(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ConfigError(fmt::format("no column '{}'", name));
    return static_cast<std::size_t>(it - columns.begin());
  }
};

/// Provenance lines, header, then rows at 17 significant digits.
inline void write_csv(std::ostream& out, const SweepResult& r) {
  for (const auto& line : r.provenance) out << "# " << line << '\n';
  for (std::size_t j = 0; j < r.columns.size(); ++j) out << (j ? "," : "") << r.columns[j];
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << fmt::format("{}{:.17g}", j ? "," : "", row[j]);
    out << '\n';
  }
}

/// Inverse of write_csv; provenance lines are returned without the "# " prefix.
inline SweepResult read_csv(std::istream& in) {
  SweepResult r;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#", 0) == 0) {
      r.provenance.push_back(line.size() > 2 ? line.substr(2) : std::string());
      continue;
    }
    if (line.empty()) continue;
    auto cells = detail::split(line, ',');
    if (!header) {
      r.columns = std::move(cells);
      header = true;
      continue;
    }
    if (cells.size() != r.columns.size()) {
      throw ConfigError(fmt::format("line {}: {} cells, expected {}", line_no, cells.size(),
                                    r.columns.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(detail::parse_number(c, fmt::format("line {}", line_no)));
    r.rows.push_back(std::move(row));
  }
  if (!header) throw ConfigError("CSV has no header line");
  return r;
}

namespace detail {
inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}
}  // namespace detail

/// Self-contained SVG line plot of every column against the first.
inline void write_svg(std::ostream& out, const SweepResult& r, const std::string& title) {
  constexpr double W = 720, H = 480, left = 80, right = 220, top = 40, bottom = 60;
  static constexpr const char* palette[] = {"#2ca02c", "#1f77b4", "#ff7f0e", "#7f7f7f",
                                            "#d62728", "#9467bd", "#8c564b", "#e377c2"};
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& row : r.rows) {
    xmin = std::min(xmin, row[0]);
    xmax = std::max(xmax, row[0]);
    for (std::size_t j = 1; j < row.size(); ++j) {
      ymin = std::min(ymin, row[j]);
      ymax = std::max(ymax, row[j]);
    }
  }
  if (r.rows.empty() || r.columns.size() < 2) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      W, H);
  out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  out << fmt::format("<text x=\"{}\" y=\"24\" font-size=\"14\">{}</text>\n", left,
                     detail::xml_escape(title));
  out << fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left,
      top, pw, ph);
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + i * (xmax - xmin) / 4, fy = ymin + i * (ymax - ymin) / 4;
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", sx(fx),
                       top + ph + 18, fx);
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.4g}</text>\n", left - 6,
                       sy(fy) + 4, fy);
  }
  if (!r.columns.empty()) {
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                       H - 16, detail::xml_escape(r.columns[0]));
  }
  for (std::size_t j = 1; j < r.columns.size(); ++j) {
    const char* color = palette[(j - 1) % std::size(palette)];
    std::string pts;
    for (const auto& row : r.rows) pts += fmt::format("{:.2f},{:.2f} ", sx(row[0]), sy(row[j]));
    out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                       color, pts);
    const double ly = top + 14.0 * static_cast<double>(j);
    out << fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>\n",
                       W - right + 10, ly - 4, W - right + 30, ly - 4, color);
    out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n", W - right + 34, ly,
                       detail::xml_escape(r.columns[j]));
  }
  out << "</svg>\n";
}

}  // namespace qdcqed::cli
