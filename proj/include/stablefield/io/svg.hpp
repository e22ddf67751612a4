#ifndef STABLEFIELD_IO_SVG_HPP
#define STABLEFIELD_IO_SVG_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stablefield/io/csv.hpp"

namespace stablefield::io {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 400;
};

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

/// Minimal line chart. Output depends only on the data, so it is reproducible.
inline std::string line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      x0 = std::min(x0, a), x1 = std::max(x1, a), y0 = std::min(y0, b), y1 = std::max(y1, b);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double left = 60, right = opt.width - 20.0, top = 30, bottom = opt.height - 40.0;
  auto px = [&](double a) { return left + (a - x0) / (x1 - x0) * (right - left); };
  auto py = [&](double b) { return bottom - (b - y0) / (y1 - y0) * (bottom - top); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << opt.width / 2 << "\" y=\"18\" text-anchor=\"middle\">"
     << xml_escape(opt.title) << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << opt.height - 8
     << "\" text-anchor=\"middle\">" << xml_escape(opt.x_label) << "</text>\n";
  os << "<text x=\"14\" y=\"" << (top + bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << (top + bottom) / 2 << ")\">" << xml_escape(opt.y_label) << "</text>\n";
  os << "<text x=\"" << left << "\" y=\"" << bottom + 14 << "\">" << format_double(x0) << "</text>\n";
  os << "<text x=\"" << right << "\" y=\"" << bottom + 14 << "\" text-anchor=\"end\">"
     << format_double(x1) << "</text>\n";
  os << "<text x=\"" << left - 4 << "\" y=\"" << bottom << "\" text-anchor=\"end\">"
     << format_double(y0) << "</text>\n";
  os << "<text x=\"" << left - 4 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">"
     << format_double(y1) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = palette[k % 5];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      os << format_double(px(a)) << ',' << format_double(py(b)) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << right - 4 << "\" y=\"" << top + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
       << colour << "\">" << xml_escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace stablefield::io

#endif  // STABLEFIELD_IO_SVG_HPP
