#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "topoae/core/delaunay.hpp"
#include "topoae/core/kd_tree.hpp"
#include "topoae/core/point_cloud.hpp"
#include "topoae/core/predicates.hpp"
#include "topoae/core/union_find.hpp"
#include "topoae/util/parallel.hpp"

namespace topoae {

inline geom::Vec2 vec2(const PointCloud& c, Index i) { return {c(i, 0), c(i, 1)}; }

/// x lies in the lens of ab under the tie-broken edge order.
inline bool in_lens(const PointCloud& c, const Edge& ab, Index x) {
  if (x == ab.u || x == ab.v) return false;
  return key_less(make_edge(c, ab.u, x), ab) && key_less(make_edge(c, ab.v, x), ab);
}

/// Sign of the side of x relative to the directed line a -> b.
inline int side(const PointCloud& c, Index a, Index b, Index x) {
  return geom::sign(geom::orient2d(vec2(c, a), vec2(c, b), vec2(c, x)));
}

struct LensSplit {
  std::vector<Index> left;     // counterclockwise of a -> b
  std::vector<Index> right;
  std::vector<Index> on_line;  // collinear, between a and b

  std::vector<Index> all() const {
    std::vector<Index> out = left;
    out.insert(out.end(), right.begin(), right.end());
    out.insert(out.end(), on_line.begin(), on_line.end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

enum class LensOrder {
  Strict,     // |xa| < |ab| and |xb| < |ab| on raw lengths
  TieBroken,  // same with the (length, min, max) edge order used by the engines
};

/// Brute-force lens of (a, b) with its split by the oriented line a -> b.
inline LensSplit lens_split(const PointCloud& c, Index a, Index b, LensOrder order = LensOrder::Strict) {
  if (c.dim() != 2) throw ValidationError("lens requires a 2D cloud");
  c.check_index(a);
  c.check_index(b);
  if (a == b) throw ValidationError("lens requires two distinct endpoints");
  const Edge ab = make_edge(c, a, b);
  LensSplit s;
  for (Index x = 0; x < c.size(); ++x) {
    if (x == a || x == b) continue;
    const bool inside = order == LensOrder::TieBroken
                            ? in_lens(c, ab, x)
                            : c.distance(a, x) < ab.length && c.distance(b, x) < ab.length;
    if (!inside) continue;
    const int o = side(c, a, b, x);
    (o > 0 ? s.left : o < 0 ? s.right : s.on_line).push_back(x);
  }
  return s;
}

inline std::vector<Index> lens(const PointCloud& c, Index a, Index b, LensOrder order = LensOrder::Strict) {
  return lens_split(c, a, b, order).all();
}

/// Disk queries that enumerate lens members through a k-d tree.
class LensIndex {
 public:
  LensIndex(const PointCloud& c, std::vector<Index> ids) : cloud_(&c), tree_(c, std::move(ids)) {}
  explicit LensIndex(const PointCloud& c) : cloud_(&c), tree_(c) {}

  /// Calls f(x) for each lens member of ab until f returns true.
  template <class F>
  bool visit(const Edge& ab, F&& f) const {
    const PointCloud& c = *cloud_;
    const double cx = 0.5 * (c(ab.u, 0) + c(ab.v, 0));
    const double cy = 0.5 * (c(ab.u, 1) + c(ab.v, 1));
    const double r2 = 0.75 * ab.length * ab.length * (1.0 + 1e-9);
    return tree_.visit_disk(cx, cy, r2, [&](Index x) { return in_lens(c, ab, x) && f(x); });
  }

  bool empty_lens(const Edge& ab) const {
    return !visit(ab, [](Index) { return true; });
  }

  /// Is some lens member strictly on side `s` (+1 left, -1 right) of u -> v?
  bool half_lens_nonempty(Index u, Index v, int s) const {
    const Edge ab = make_edge(*cloud_, u, v);
    return visit(ab, [&](Index x) { return side(*cloud_, u, v, x) == s; });
  }

 private:
  const PointCloud* cloud_;
  KdTree2 tree_;
};

/// Kruskal over candidate edges; the returned set keeps insertion order.
inline EdgeSet kruskal(std::size_t n, std::vector<Edge> candidates) {
  std::sort(candidates.begin(), candidates.end(), key_less);
  UnionFind uf(n);
  EdgeSet out;
  for (const Edge& e : candidates) {
    if (out.size() + 1 >= n) break;
    const auto [root, absorbed] = uf.unite(e.u, e.v);
    if (root != absorbed) out.insert(e);
  }
  return out;
}

/// Exact Euclidean MST in any dimension from all n(n-1)/2 edges.
inline EdgeSet mst_highdim(const PointCloud& c) {
  if (c.empty()) throw ValidationError("mst of an empty cloud");
  std::vector<Edge> all;
  all.reserve(c.size() * (c.size() - 1) / 2);
  for (Index i = 0; i < c.size(); ++i)
    for (Index j = i + 1; j < c.size(); ++j) all.push_back(make_edge(c, i, j));
  return kruskal(c.size(), std::move(all));
}

enum class EdgeClass : std::uint8_t { Delaunay = 0, Urquhart = 1, Rng = 2, Mst = 3 };

struct RngPolygon {
  std::vector<std::uint32_t> triangles;
  std::vector<Index> vertices;  // sorted
  Edge longest_deleted;         // e_DR
};

struct RngPolygonDecomposition {
  std::vector<RngPolygon> polygons;               // bounded classes only
  std::vector<std::int32_t> polygon_of_triangle;  // -1 for the unbounded region
};

struct NeighborhoodGraphs {
  DelaunayStructure del;
  std::vector<EdgeClass> edge_class;  // strongest membership per Delaunay edge
  EdgeSet ug, rng, mst;
  RngPolygonDecomposition polygons;

  Edge edge(const PointCloud& c, std::size_t k) const { return make_edge(c, del.edges[k].u, del.edges[k].v); }
};

namespace detail {

// Union-find over triangles plus one node for the unbounded region, with the
// key-longest deleted edge carried per class.
class PolygonBuilder {
 public:
  explicit PolygonBuilder(std::size_t triangles)
      : uf_(triangles + 1), longest_(triangles + 1), has_(triangles + 1, false), outer_(triangles) {}

  void remove(const DelaunayEdge& de, const Edge& e) {
    const std::uint32_t a = static_cast<std::uint32_t>(de.tri[0]);
    const std::uint32_t b = de.on_hull() ? outer_ : static_cast<std::uint32_t>(de.tri[1]);
    const auto [root, absorbed] = uf_.unite(a, b);
    Edge best = e;
    for (std::uint32_t r : {root, absorbed})
      if (has_[r] && key_less(best, longest_[r])) best = longest_[r];
    longest_[root] = best;
    has_[root] = true;
  }

  RngPolygonDecomposition finish(const DelaunayStructure& del) {
    RngPolygonDecomposition out;
    const std::size_t t = del.triangles.size();
    out.polygon_of_triangle.assign(t, -1);
    std::vector<std::int32_t> id_of_root(t + 1, -1);
    const std::uint32_t outer_root = uf_.find(outer_);
    for (std::uint32_t k = 0; k < t; ++k) {
      const std::uint32_t r = uf_.find(k);
      if (r == outer_root) continue;
      if (id_of_root[r] < 0) {
        id_of_root[r] = static_cast<std::int32_t>(out.polygons.size());
        out.polygons.emplace_back();
        if (!has_[r]) throw InternalError("rng polygon without a deleted Delaunay edge");
        out.polygons.back().longest_deleted = longest_[r];
      }
      auto& poly = out.polygons[id_of_root[r]];
      poly.triangles.push_back(k);
      poly.vertices.insert(poly.vertices.end(), del.triangles[k].begin(), del.triangles[k].end());
      out.polygon_of_triangle[k] = id_of_root[r];
    }
    for (auto& poly : out.polygons) {
      std::sort(poly.vertices.begin(), poly.vertices.end());
      poly.vertices.erase(std::unique(poly.vertices.begin(), poly.vertices.end()), poly.vertices.end());
    }
    return out;
  }

 private:
  UnionFind uf_;
  std::vector<Edge> longest_;
  std::vector<bool> has_;
  std::uint32_t outer_;
};

}  // namespace detail

/// UG, MST, RNG and the RNG-polygon decomposition from a Delaunay
/// triangulation. Lens tests over UG \ MST may run on several threads.
inline NeighborhoodGraphs derive_graphs(const PointCloud& c, DelaunayStructure del, unsigned threads = 1) {
  if (c.dim() != 2) throw ValidationError("derive_graphs requires a 2D cloud");
  NeighborhoodGraphs g;
  g.del = std::move(del);
  const auto& de = g.del.edges;
  const std::size_t m = de.size();
  std::vector<Edge> len(m);
  for (std::size_t k = 0; k < m; ++k) len[k] = make_edge(c, de[k].u, de[k].v);

  // Urquhart graph: drop the key-longest edge of every triangle.
  g.edge_class.assign(m, EdgeClass::Urquhart);
  for (const auto& te : g.del.triangle_edges) {
    std::uint32_t worst = te[0];
    for (int k = 1; k < 3; ++k)
      if (key_less(len[worst], len[te[k]])) worst = te[k];
    g.edge_class[worst] = EdgeClass::Delaunay;
  }
  detail::PolygonBuilder polys(g.del.triangles.size());
  std::vector<Edge> ug_edges;
  for (std::size_t k = 0; k < m; ++k) {
    if (g.edge_class[k] == EdgeClass::Delaunay) {
      polys.remove(de[k], len[k]);
    } else {
      ug_edges.push_back(len[k]);
      g.ug.insert(len[k]);
    }
  }

  g.mst = kruskal(c.size(), ug_edges);

  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < m; ++k) {
    if (g.edge_class[k] != EdgeClass::Urquhart) continue;
    if (g.mst.contains(len[k])) g.edge_class[k] = EdgeClass::Mst;
    else pending.push_back(k);
  }
  std::vector<std::uint8_t> empty(pending.size(), 0);
  if (!pending.empty()) {
    const LensIndex index(c);
    parallel_for(0, pending.size(), threads, [&](std::size_t i) { empty[i] = index.empty_lens(len[pending[i]]); });
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const std::size_t k = pending[i];
    if (empty[i]) g.edge_class[k] = EdgeClass::Rng;
    else polys.remove(de[k], len[k]);
  }
  for (const Edge& e : g.mst) g.rng.insert(e);
  for (std::size_t k = 0; k < m; ++k)
    if (g.edge_class[k] == EdgeClass::Rng) g.rng.insert(len[k]);

  g.polygons = polys.finish(g.del);
  if (g.polygons.polygons.size() != g.rng.size() - g.mst.size())
    throw InternalError("rng polygon count differs from |RNG \\ MST|");
  return g;
}

inline NeighborhoodGraphs neighborhood_graphs(const PointCloud& c, unsigned threads = 1) {
  return derive_graphs(c, delaunay(c), threads);
}

}  // namespace topoae
