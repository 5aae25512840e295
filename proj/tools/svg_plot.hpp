#pragma once

// Minimal static line plots as SVG. One panel per series group, stacked
// vertically, linear axes with min/max tick labels.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace lab {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct Panel {
  std::string title;
  std::vector<Series> series;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

inline void write_svg(const std::string& path, const std::vector<Panel>& panels) {
  const double W = 640, H = 220, ml = 70, mr = 20, mt = 28, mb = 30;
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ofstream os(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H * panels.size()
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double y0 = H * static_cast<double>(p);
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : panels[p].series)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    if (!std::isfinite(xmin)) continue;
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
      ymin -= 0.5 * std::max(1e-12, std::abs(ymin));
      ymax += 0.5 * std::max(1e-12, std::abs(ymax));
    }
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double y) { return y0 + mt + (ymax - y) / (ymax - ymin) * (H - mt - mb); };
    os << "<text x=\"" << ml << "\" y=\"" << y0 + 16 << "\" font-weight=\"bold\">" << panels[p].title << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << y0 + mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
       << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << ml - 4 << "\" y=\"" << Y(ymax) + 4 << "\" text-anchor=\"end\">" << detail::num(ymax)
       << "</text>\n";
    os << "<text x=\"" << ml - 4 << "\" y=\"" << Y(ymin) << "\" text-anchor=\"end\">" << detail::num(ymin)
       << "</text>\n";
    os << "<text x=\"" << ml << "\" y=\"" << y0 + H - 12 << "\">" << detail::num(xmin) << "</text>\n";
    os << "<text x=\"" << W - mr << "\" y=\"" << y0 + H - 12 << "\" text-anchor=\"end\">" << detail::num(xmax)
       << "</text>\n";
    for (std::size_t k = 0; k < panels[p].series.size(); ++k) {
      const auto& s = panels[p].series[k];
      const char* c = colours[k % 5];
      os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << detail::num(X(s.x[i])) << ',' << detail::num(Y(s.y[i])) << ' ';
      os << "\"/>\n";
      os << "<text x=\"" << W - mr - 4 << "\" y=\"" << y0 + mt + 14 + 13 * static_cast<double>(k)
         << "\" text-anchor=\"end\" fill=\"" << c << "\">" << s.label << "</text>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace lab
