#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "chordal.hpp"
#include "driving.hpp"

namespace loewner {

/// CSV with header `t,re,im`, 17 significant digits, LF line endings.
inline void write_trace_csv(std::ostream &os, const TracePolyline &tr) {
  os << "t,re,im\n";
  for (std::size_t j = 0; j < tr.points.size(); ++j)
    os << format_double(tr.times[j]) << ',' << format_double(tr.points[j].real()) << ','
       << format_double(tr.points[j].imag()) << '\n';
}

/// Static figure: both axes and one polyline through every sample.
inline void write_trace_svg(std::ostream &os, const TracePolyline &tr, int width = 480,
                            int height = 480) {
  double xmin = -1.0, xmax = 1.0, ymax = 1.0;
  for (const cd &p : tr.points) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymax = std::max(ymax, p.imag());
  }
  const double half = 0.55 * std::max(xmax - xmin, ymax);
  const double cx = 0.5 * (xmin + xmax);
  const double scale = std::min(width, height) / (2.0 * half);
  auto px = [&](double x) { return 0.5 * width + (x - cx) * scale; };
  auto py = [&](double y) { return height - 0.05 * height - y * scale * 0.9; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "  <line x1=\"0\" y1=\"" << py(0.0) << "\" x2=\"" << width << "\" y2=\"" << py(0.0)
     << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  os << "  <line x1=\"" << px(0.0) << "\" y1=\"0\" x2=\"" << px(0.0) << "\" y2=\"" << height
     << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  os << "  <polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t j = 0; j < tr.points.size(); ++j) {
    if (j) os << ' ';
    os << px(tr.points[j].real()) << ',' << py(tr.points[j].imag());
  }
  os << "\"/>\n</svg>\n";
}

} // namespace loewner
