#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "topoae/core/graphs.hpp"
#include "topoae/core/point_cloud.hpp"
#include "topoae/core/union_find.hpp"
#include "topoae/ph/diagram.hpp"
#include "topoae/util/parallel.hpp"

namespace topoae {

struct PlanarOptions {
  unsigned threads = 1;  // 0 = all hardware threads
};

struct MmlCandidate {
  Edge edge{};
  std::int32_t polygon = -1;
  bool expandable = false;
};

struct PlanarTimings {
  double build_ms = 0.0;    // Delaunay, UG, MST, RNG, polygons
  double mml_ms = 0.0;      // killing-edge search
  double pairing_ms = 0.0;  // death triangles and dual Kruskal
  double total_ms = 0.0;
};

struct WindowStats {
  std::size_t pairs = 0;      // non-RNG vertex pairs over all polygons
  std::size_t discarded = 0;  // of those, outside the length window
  std::optional<double> fraction() const {
    if (pairs == 0) return std::nullopt;
    return double(discarded) / double(pairs);
  }
};

struct PlanarResult {
  RipsDiagrams diagrams;
  NeighborhoodGraphs graphs;
  std::vector<MmlCandidate> killers;                 // one per bounded polygon
  std::vector<std::array<Index, 3>> death_triangles; // one per bounded polygon
  WindowStats window;
  PlanarTimings timings;

  /// MST, RNG \ MST and the death edges.
  EdgeSet critical_edges() const {
    EdgeSet out = graphs.mst;
    out.insert_all(graphs.rng);
    for (const auto& k : killers) out.insert(k.edge);
    return out;
  }
};

namespace detail {

// Lens queries restricted to a polygon's vertex set.
class PolygonLens {
 public:
  PolygonLens(const PointCloud& c, const std::vector<Index>& vertices) : cloud_(&c), vertices_(&vertices) {
    if (vertices.size() > kBruteForceLimit) index_.emplace(c, vertices);
  }

  bool half_nonempty(Index u, Index v, int s) const {
    const Edge e = make_edge(*cloud_, u, v);
    auto hit = [&](Index x) { return side(*cloud_, u, v, x) == s; };
    if (index_) return index_->visit(e, hit);
    for (Index x : *vertices_)
      if (in_lens(*cloud_, e, x) && hit(x)) return true;
    return false;
  }

  template <class F>
  bool any_in_half(Index u, Index v, int s, F&& pred) const {
    const Edge e = make_edge(*cloud_, u, v);
    auto hit = [&](Index x) { return side(*cloud_, u, v, x) == s && pred(x); };
    if (index_) return index_->visit(e, hit);
    for (Index x : *vertices_)
      if (in_lens(*cloud_, e, x) && hit(x)) return true;
    return false;
  }

  /// Both half-lenses non-empty and flanking vertices with empty inner
  /// half-lenses exist on both sides.
  bool expandable_two_edge(Index v1, Index v2) const {
    if (!half_nonempty(v1, v2, +1) || !half_nonempty(v1, v2, -1)) return false;
    const bool left = any_in_half(v1, v2, +1, [&](Index x) {
      return !half_nonempty(v1, x, -1) && !half_nonempty(x, v2, -1);
    });
    if (!left) return false;
    return any_in_half(v1, v2, -1, [&](Index y) { return !half_nonempty(v2, y, -1) && !half_nonempty(y, v1, -1); });
  }

 private:
  static constexpr std::size_t kBruteForceLimit = 48;
  const PointCloud* cloud_;
  const std::vector<Index>* vertices_;
  std::optional<LensIndex> index_;
};

inline bool in_window(const Edge& e, const Edge& dr) {
  constexpr double kLow = 0.8660254037844386 * (1.0 - 1e-12);
  return e.length >= kLow * dr.length && e.length <= dr.length;
}

// Candidate pairs of one polygon inside the window, with counts for the
// discard statistic.
inline std::vector<Edge> window_candidates(const PointCloud& c, const RngPolygon& poly, const EdgeSet& rng,
                                           WindowStats* stats) {
  std::vector<Edge> out;
  const auto& vs = poly.vertices;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      if (rng.contains(vs[i], vs[j])) continue;
      const Edge e = make_edge(c, vs[i], vs[j]);
      const bool keep = in_window(e, poly.longest_deleted);
      if (stats) {
        ++stats->pairs;
        if (!keep) ++stats->discarded;
      }
      if (keep) out.push_back(e);
    }
  return out;
}

}  // namespace detail

/// Shortest expandable 2-edge of a bounded RNG-polygon inside the window
/// [sqrt(3)/2 * delta_DR, delta_DR]. That edge kills the polygon's class.
inline MmlCandidate find_mml_edge(const PointCloud& c, const RngPolygon& poly, const EdgeSet& rng,
                                  std::int32_t polygon_id = -1) {
  auto cands = detail::window_candidates(c, poly, rng, nullptr);
  std::sort(cands.begin(), cands.end(), key_less);
  const detail::PolygonLens lens(c, poly.vertices);
  for (const Edge& e : cands)
    if (lens.expandable_two_edge(e.u, e.v)) return {e, polygon_id, true};
  throw InternalError("no expandable 2-edge inside the length window of an RNG polygon");
}

/// Death triangle of killing edge ab: scanning its lens in triangle
/// filtration order (by the longer of the two other sides), the first vertex
/// strictly on the other side of the first one.
inline std::array<Index, 3> death_triangle(const PointCloud& c, const LensIndex& index, const Edge& ab) {
  std::vector<Index> members;
  index.visit(ab, [&](Index x) {
    members.push_back(x);
    return false;
  });
  std::vector<std::pair<Edge, Index>> order;
  order.reserve(members.size());
  for (Index x : members) {
    const Edge e1 = make_edge(c, ab.u, x), e2 = make_edge(c, ab.v, x);
    order.push_back({key_less(e1, e2) ? e2 : e1, x});
  }
  std::sort(order.begin(), order.end(), [](const auto& l, const auto& r) { return key_less(l.first, r.first); });
  for (std::size_t k = 0; k < order.size(); ++k) members[k] = order[k].second;
  if (members.empty()) throw InternalError("killing edge has an empty lens");
  const int s1 = side(c, ab.u, ab.v, members.front());
  if (s1 == 0) throw InternalError("killing edge passes through a lens vertex");
  for (std::size_t k = 1; k < members.size(); ++k) {
    const int s = side(c, ab.u, ab.v, members[k]);
    if (s == 0) throw InternalError("killing edge passes through a lens vertex");
    if (s == -s1) {
      std::array<Index, 3> t{ab.u, ab.v, members[k]};
      std::sort(t.begin(), t.end());
      return t;
    }
  }
  throw InternalError("killing edge has a one-sided lens");
}

/// Exact Rips persistence of a planar cloud without matrix reduction.
inline PlanarResult planar_rips_analysis(const PointCloud& c, const PlanarOptions& opt = {}) {
  using Clock = std::chrono::steady_clock;
  const auto ms = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  if (c.dim() != 2) throw ValidationError("planar persistence requires a 2D cloud");
  if (c.empty()) throw ValidationError("planar persistence of an empty cloud");
  const auto t0 = Clock::now();
  PlanarResult res;
  res.graphs = neighborhood_graphs(c, opt.threads);
  const auto& g = res.graphs;
  res.diagrams.dgm0 = dgm0_from_mst(c, g.mst.edges());
  const auto t1 = Clock::now();

  const auto& polys = g.polygons.polygons;
  const std::size_t np = polys.size();
  res.killers.resize(np);
  const unsigned threads = opt.threads == 0 ? hardware_threads() : opt.threads;
  if (threads <= 1) {
    for (std::size_t p = 0; p < np; ++p) {
      detail::window_candidates(c, polys[p], g.rng, &res.window);
      res.killers[p] = find_mml_edge(c, polys[p], g.rng, static_cast<std::int32_t>(p));
    }
  } else {
    // One flat array of candidates over all polygons, checked in parallel,
    // then reduced to per-polygon minima.
    std::vector<Edge> flat;
    std::vector<std::uint32_t> owner;
    for (std::size_t p = 0; p < np; ++p) {
      for (const Edge& e : detail::window_candidates(c, polys[p], g.rng, &res.window)) {
        flat.push_back(e);
        owner.push_back(static_cast<std::uint32_t>(p));
      }
    }
    std::vector<detail::PolygonLens> lenses;
    lenses.reserve(np);
    for (const auto& poly : polys) lenses.emplace_back(c, poly.vertices);
    std::vector<std::uint8_t> ok(flat.size(), 0);
    parallel_for(0, flat.size(), threads,
                 [&](std::size_t i) { ok[i] = lenses[owner[i]].expandable_two_edge(flat[i].u, flat[i].v); });
    std::vector<bool> found(np, false);
    for (std::size_t i = 0; i < flat.size(); ++i) {
      if (!ok[i]) continue;
      auto& k = res.killers[owner[i]];
      if (!found[owner[i]] || key_less(flat[i], k.edge)) k = {flat[i], static_cast<std::int32_t>(owner[i]), true};
      found[owner[i]] = true;
    }
    for (std::size_t p = 0; p < np; ++p)
      if (!found[p]) throw InternalError("no expandable 2-edge inside the length window of an RNG polygon");
  }
  const auto t2 = Clock::now();

  res.death_triangles.resize(np);
  if (np > 0) {
    const LensIndex index(c);
    for (std::size_t p = 0; p < np; ++p) res.death_triangles[p] = death_triangle(c, index, res.killers[p].edge);
  }

  // Dual graph: bounded polygons plus the outer face, linked by RNG \ MST
  // edges. Kruskal in decreasing edge order; each merge retires the side
  // whose largest killing edge is smaller.
  std::vector<std::pair<Edge, std::array<std::int32_t, 2>>> dual;
  const auto outer = static_cast<std::int32_t>(np);
  for (std::size_t k = 0; k < g.del.edges.size(); ++k) {
    if (g.edge_class[k] != EdgeClass::Rng) continue;
    const auto& de = g.del.edges[k];
    std::array<std::int32_t, 2> sides{};
    for (int s = 0; s < 2; ++s) {
      const std::int32_t t = de.tri[s];
      const std::int32_t pid = t < 0 ? -1 : g.polygons.polygon_of_triangle[t];
      sides[s] = pid < 0 ? outer : pid;
    }
    dual.push_back({g.edge(c, k), sides});
  }
  std::sort(dual.begin(), dual.end(), [](const auto& a, const auto& b) { return key_less(b.first, a.first); });
  UnionFind uf(np + 1);
  std::vector<std::int32_t> top(np + 1);  // polygon with the largest killing edge per class, outer dominates
  for (std::size_t p = 0; p <= np; ++p) top[p] = static_cast<std::int32_t>(p);
  auto dominates = [&](std::int32_t a, std::int32_t b) {
    if (a == outer) return true;
    if (b == outer) return false;
    return key_less(res.killers[b].edge, res.killers[a].edge);
  };
  std::vector<PersistencePair> dgm1;
  for (const auto& [e, sides] : dual) {
    const std::uint32_t r1 = uf.find(sides[0]), r2 = uf.find(sides[1]);
    if (r1 == r2) throw InternalError("RNG \\ MST edge bounds the same dual component twice");
    const std::int32_t a = top[r1], b = top[r2];
    const std::int32_t survivor = dominates(a, b) ? a : b;
    const std::int32_t dying = survivor == a ? b : a;
    const auto [root, absorbed] = uf.unite(r1, r2);
    (void)absorbed;
    top[root] = survivor;
    PersistencePair pp;
    pp.dim = 1;
    pp.birth_edge = e;
    pp.death_edge = res.killers[dying].edge;
    pp.birth_simplex = {e.u, e.v};
    const auto& tri = res.death_triangles[dying];
    pp.death_simplex.assign(tri.begin(), tri.end());
    pp.birth = e.length;
    pp.death = pp.death_edge.length;
    dgm1.push_back(std::move(pp));
  }
  if (dgm1.size() != np) throw InternalError("dual pairing produced the wrong number of classes");
  res.diagrams.dgm1 = PersistenceDiagram(1, std::move(dgm1));
  const auto t3 = Clock::now();
  res.timings = {ms(t0, t1), ms(t1, t2), ms(t2, t3), ms(t0, t3)};
  return res;
}

inline RipsDiagrams planar_rips_persistence(const PointCloud& c, const PlanarOptions& opt = {}) {
  return planar_rips_analysis(c, opt).diagrams;
}

inline EdgeSet critical_edges_planar(const PointCloud& c, const PlanarOptions& opt = {}) {
  return planar_rips_analysis(c, opt).critical_edges();
}

/// Fraction of polygon vertex pairs (RNG edges excluded) outside the length
/// window; empty when the cloud has no bounded polygon.
inline std::optional<double> window_discard_stats(const PointCloud& c, const PlanarOptions& opt = {}) {
  return planar_rips_analysis(c, opt).window.fraction();
}

}  // namespace topoae
