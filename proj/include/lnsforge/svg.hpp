#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "lnsforge/errors.hpp"
#include "lnsforge/metrics.hpp"

namespace lnsforge {

struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal standalone line plot, optionally log-scaled on x, used to mirror
// the gap/survival figures. No external plotting dependency.
inline void write_svg_plot(const std::string& path,
                           const std::vector<SvgSeries>& series,
                           const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label, bool log_x) {
  const int w = 640, h = 420, ml = 60, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const SvgSeries& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double xv = s.x[i];
      if (log_x && xv <= 0.0) continue;
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmin > xmax) {
    xmin = log_x ? 0.1 : 0.0;
    xmax = 1.0;
  }
  if (ymin > ymax) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  const auto tx = [&](double v) {
    double a = log_x ? std::log10(std::max(v, 1e-12)) : v;
    double lo = log_x ? std::log10(std::max(xmin, 1e-12)) : xmin;
    double hi = log_x ? std::log10(std::max(xmax, 1e-12)) : xmax;
    if (hi - lo < 1e-12) hi = lo + 1.0;
    return ml + (a - lo) / (hi - lo) * (w - ml - mr);
  };
  const auto ty = [&](double v) {
    return h - mb - (v - ymin) / (ymax - ymin) * (h - mt - mb);
  };

  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
      << "' height='" << h << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << w / 2 << "' y='20' text-anchor='middle' "
      << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
      << "' y2='" << h - mb << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << h - mb << "' stroke='black'/>\n";
  out << "<text x='" << w / 2 << "' y='" << h - 12
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
      << x_label << (log_x ? " (log)" : "") << "</text>\n";
  out << "<text x='14' y='" << h / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='12' "
      << "transform='rotate(-90 14 " << h / 2 << ")'>" << y_label
      << "</text>\n";
  // y-axis ticks
  for (int i = 0; i <= 4; ++i) {
    const double v = ymin + (ymax - ymin) * i / 4.0;
    out << "<text x='" << ml - 6 << "' y='" << ty(v) + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
        << v << "</text>\n";
  }
  int li = 0;
  for (const SvgSeries& s : series) {
    out << "<polyline fill='none' stroke='" << s.color
        << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_x && s.x[i] <= 0.0) continue;
      out << tx(s.x[i]) << ',' << ty(s.y[i]) << ' ';
    }
    out << "'/>\n";
    out << "<text x='" << w - mr - 150 << "' y='" << mt + 16 * li
        << "' font-family='sans-serif' font-size='11' fill='" << s.color
        << "'>" << s.label << "</text>\n";
    ++li;
  }
  out << "</svg>\n";
}

}  // namespace lnsforge
