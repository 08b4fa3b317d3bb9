#pragma once

#include <algorithm>
#include <array>
#include <unordered_map>
#include <vector>

#include "topoae/core/errors.hpp"
#include "topoae/core/predicates.hpp"
#include "topoae/ph/rips.hpp"

namespace topoae {

using Point2 = std::array<double, 2>;

struct GeneratorPolyline {
  PersistencePair pair;
  std::vector<Index> cycle;      // closed walk, first vertex not repeated
  std::vector<Point2> points;    // Z coordinates along the walk
  std::vector<Point2> smoothed;  // display version
  int self_intersections = 0;    // proper crossings of the raw polyline
};

struct GeneratorOptions {
  double threshold = 0.2;  // fraction of the largest persistence
  int smoothing_passes = 2;
  std::size_t max_points = 3000;
};

/// Orders the edges of a 1-cycle into one closed walk (Eulerian circuit).
inline std::vector<Index> order_cycle(const EdgeSet& edges) {
  if (edges.empty()) return {};
  std::unordered_map<Index, std::vector<std::pair<Index, std::size_t>>> adj;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back({edges[i].v, i});
    adj[edges[i].v].push_back({edges[i].u, i});
  }
  for (auto& [v, nb] : adj) {
    if (nb.size() % 2) throw InternalError("generator has a vertex of odd degree");
    std::sort(nb.begin(), nb.end());
  }
  std::vector<char> used(edges.size(), 0);
  std::unordered_map<Index, std::size_t> next;
  std::vector<Index> stack{edges[0].u}, walk;
  while (!stack.empty()) {
    const Index v = stack.back();
    auto& nb = adj[v];
    std::size_t& k = next[v];
    while (k < nb.size() && used[nb[k].second]) ++k;
    if (k == nb.size()) {
      walk.push_back(v);
      stack.pop_back();
    } else {
      used[nb[k].second] = 1;
      stack.push_back(nb[k].first);
    }
  }
  if (walk.size() != edges.size() + 1) throw InternalError("generator does not close into a single cycle");
  walk.pop_back();
  return walk;
}

/// Proper crossings between non-adjacent segments of a closed polyline.
inline int count_self_intersections(const std::vector<Point2>& pts) {
  const std::size_t m = pts.size();
  if (m < 4) return 0;
  auto v = [&](std::size_t i) { return geom::Vec2{pts[i % m][0], pts[i % m][1]}; };
  int count = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;  // share the closing vertex
      const geom::Vec2 a = v(i), b = v(i + 1), c = v(j), d = v(j + 1);
      const double o1 = geom::orient2d(a, b, c), o2 = geom::orient2d(a, b, d);
      const double o3 = geom::orient2d(c, d, a), o4 = geom::orient2d(c, d, b);
      if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) ++count;
    }
  return count;
}

/// Closed 3-point moving average, repeated `passes` times.
inline std::vector<Point2> smooth_closed(std::vector<Point2> pts, int passes) {
  const std::size_t m = pts.size();
  if (m < 3) return pts;
  for (int p = 0; p < passes; ++p) {
    std::vector<Point2> s(m);
    for (std::size_t i = 0; i < m; ++i) {
      const Point2& a = pts[(i + m - 1) % m];
      const Point2& b = pts[i];
      const Point2& c = pts[(i + 1) % m];
      s[i] = {(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0};
    }
    pts.swap(s);
  }
  return pts;
}

/// Persistent generators of X drawn over the 2D embedding Z. Only pairs
/// whose persistence exceeds threshold times the largest one are kept.
inline std::vector<GeneratorPolyline> project_generators(const PointCloud& z, const std::vector<CascadeRecord>& recs,
                                                         const GeneratorOptions& opt = {}) {
  if (z.dim() != 2) throw ValidationError("generators are projected onto 2D embeddings");
  double top = 0.0;
  for (const auto& r : recs) top = std::max(top, r.pair.persistence());
  std::vector<GeneratorPolyline> out;
  for (const auto& r : recs) {
    if (!(r.pair.persistence() > opt.threshold * top)) continue;
    GeneratorPolyline g;
    g.pair = r.pair;
    g.cycle = order_cycle(r.generator);
    for (Index v : g.cycle) {
      if (v >= z.size()) throw ValidationError("generator vertex outside the embedding");
      g.points.push_back({z(v, 0), z(v, 1)});
    }
    g.smoothed = smooth_closed(g.points, opt.smoothing_passes);
    g.self_intersections = count_self_intersections(g.points);
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.pair.persistence() > b.pair.persistence(); });
  return out;
}

inline std::vector<GeneratorPolyline> project_generators(const PointCloud& x, const PointCloud& z,
                                                         const GeneratorOptions& opt = {}) {
  if (x.size() != z.size()) throw ValidationError("generators: X and Z have different sizes");
  if (x.size() < 3) return {};
  const RipsFiltration f(x, opt.max_points);
  return project_generators(z, cascades(f, positive_pairs(f, 1)), opt);
}

}  // namespace topoae
