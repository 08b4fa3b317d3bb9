#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "topoae/eval/generators.hpp"
#include "topoae/io/csv.hpp"

namespace topoae::io {

struct SvgOptions {
  int size = 800;      // square canvas in pixels
  int margin = 30;
  bool smoothed = true;  // draw the display version of each generator
  double point_radius = 2.5;
};

namespace detail {

// Piecewise-linear ramp from dark blue through teal to yellow.
inline std::string ramp_color(double t) {
  static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
  return buf;
}

}  // namespace detail

/// Embedding as gray dots, each generator as a closed polyline whose color
/// follows its arc length.
inline std::string render_svg(const PointCloud& z, const std::vector<GeneratorPolyline>& gens, const SvgOptions& opt = {}) {
  if (z.dim() != 2) throw ValidationError("svg output needs a 2D embedding");
  double lo[2] = {0, 0}, hi[2] = {1, 1};
  if (!z.empty()) {
    for (int k = 0; k < 2; ++k) {
      lo[k] = hi[k] = z(0, k);
      for (Index i = 1; i < z.size(); ++i) {
        lo[k] = std::min(lo[k], z(i, k));
        hi[k] = std::max(hi[k], z(i, k));
      }
    }
  }
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-300});
  const double scale = (opt.size - 2.0 * opt.margin) / span;
  auto px = [&](double x) { return opt.margin + (x - lo[0]) * scale; };
  auto py = [&](double y) { return opt.size - opt.margin - (y - lo[1]) * scale; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.size << "\" height=\"" << opt.size
     << "\" viewBox=\"0 0 " << opt.size << ' ' << opt.size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g fill=\"#777\">\n";
  for (Index i = 0; i < z.size(); ++i)
    os << "<circle cx=\"" << format_double(px(z(i, 0))) << "\" cy=\"" << format_double(py(z(i, 1))) << "\" r=\""
       << opt.point_radius << "\"/>\n";
  os << "</g>\n";
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const auto& pts = opt.smoothed ? gens[g].smoothed : gens[g].points;
    const std::size_t m = pts.size();
    if (m < 2) continue;
    std::vector<double> arc(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& a = pts[i];
      const auto& b = pts[(i + 1) % m];
      arc[i + 1] = arc[i] + std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    const double total = arc[m] > 0 ? arc[m] : 1.0;
    os << "<g class=\"generator\" data-birth=\"" << format_double(gens[g].pair.birth) << "\" data-death=\""
       << format_double(gens[g].pair.death) << "\" data-crossings=\"" << gens[g].self_intersections
       << "\" stroke-width=\"2.5\" stroke-linecap=\"round\">\n";
    for (std::size_t i = 0; i < m; ++i) {
      const auto& a = pts[i];
      const auto& b = pts[(i + 1) % m];
      os << "<line x1=\"" << format_double(px(a[0])) << "\" y1=\"" << format_double(py(a[1])) << "\" x2=\""
         << format_double(px(b[0])) << "\" y2=\"" << format_double(py(b[1])) << "\" stroke=\""
         << detail::ramp_color(0.5 * (arc[i] + arc[i + 1]) / total) << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// generator,vertex,x,y rows, one per polyline vertex.
inline std::string generators_csv(const std::vector<GeneratorPolyline>& gens) {
  std::ostringstream os;
  os << "generator,vertex,x,y\n";
  for (std::size_t g = 0; g < gens.size(); ++g)
    for (std::size_t i = 0; i < gens[g].cycle.size(); ++i)
      os << g << ',' << gens[g].cycle[i] << ',' << format_double(gens[g].points[i][0]) << ','
         << format_double(gens[g].points[i][1]) << '\n';
  return os.str();
}

}  // namespace topoae::io
