#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "topoae/core/point_cloud.hpp"
#include "topoae/core/predicates.hpp"

namespace topoae {

struct DelaunayEdge {
  Index u = 0;  // u < v
  Index v = 0;
  std::array<std::int32_t, 2> tri{-1, -1};  // tri[1] < 0 on the convex hull

  bool on_hull() const { return tri[1] < 0; }
};

struct DelaunayStructure {
  std::vector<std::array<Index, 3>> triangles;              // counterclockwise
  std::vector<std::array<std::int32_t, 3>> neighbors;       // across the edge opposite vertex k, -1 outside
  std::vector<std::array<std::uint32_t, 3>> triangle_edges; // index into edges, opposite vertex k
  std::vector<DelaunayEdge> edges;

  std::size_t hull_edge_count() const {
    return std::count_if(edges.begin(), edges.end(), [](const DelaunayEdge& e) { return e.on_hull(); });
  }
};

namespace detail {

inline std::uint32_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  constexpr std::uint32_t kSide = 1u << 16;
  std::uint32_t d = 0;
  for (std::uint32_t s = kSide / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = kSide - 1 - x;
        y = kSide - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

inline std::vector<Index> hilbert_order(const std::vector<geom::Vec2>& pts) {
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
  std::vector<std::pair<std::uint32_t, Index>> keyed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto gx = static_cast<std::uint32_t>((pts[i].x - xmin) / span * 65535.0);
    const auto gy = static_cast<std::uint32_t>((pts[i].y - ymin) / span * 65535.0);
    keyed[i] = {hilbert_index(gx, gy), static_cast<Index>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<Index> order(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) order[i] = keyed[i].second;
  return order;
}

class Triangulator {
 public:
  static constexpr Index kGhost = std::numeric_limits<Index>::max();

  explicit Triangulator(const PointCloud& cloud) {
    pts_.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) pts_[i] = {cloud(i, 0), cloud(i, 1)};
  }

  DelaunayStructure run() {
    const std::size_t n = pts_.size();
    if (n < 2) return {};
    std::vector<Index> order = hilbert_order(pts_);
    std::size_t third = 2;
    while (third < n && geom::orient2d(pts_[order[0]], pts_[order[1]], pts_[order[third]]) == 0.0) ++third;
    if (third == n) return collinear_chain();
    const Index k = order[third];
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(third));
    order.insert(order.begin() + 2, k);

    init(order[0], order[1], order[2]);
    for (std::size_t i = 3; i < n; ++i) insert(order[i]);
    return finish();
  }

 private:
  struct Tri {
    Index v[3];
    std::int32_t n[3];
    bool alive;
  };

  struct BoundaryEdge {
    Index a, b;
    std::int32_t outside;
  };

  bool ghost(const Tri& t) const { return t.v[0] == kGhost || t.v[1] == kGhost || t.v[2] == kGhost; }

  double orient(Index a, Index b, Index c) const { return geom::orient2d(pts_[a], pts_[b], pts_[c]); }

  bool conflict(std::int32_t ti, Index p) const {
    const Tri& t = tris_[ti];
    if (!ghost(t)) return geom::incircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], pts_[p]) > 0.0;
    int k = 0;
    while (t.v[k] != kGhost) ++k;
    const Index u = t.v[(k + 1) % 3], w = t.v[(k + 2) % 3];
    const double o = orient(u, w, p);
    if (o > 0.0) return true;
    if (o < 0.0) return false;
    const geom::Vec2 &a = pts_[u], &b = pts_[w], &q = pts_[p];
    return (q.x - a.x) * (b.x - a.x) + (q.y - a.y) * (b.y - a.y) > 0.0 &&
           (q.x - b.x) * (a.x - b.x) + (q.y - b.y) * (a.y - b.y) > 0.0;
  }

  std::int32_t make_tri(Index a, Index b, Index c) {
    std::int32_t id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
    } else {
      id = static_cast<std::int32_t>(tris_.size());
      tris_.emplace_back();
      mark_.push_back(0);
    }
    tris_[id] = Tri{{a, b, c}, {-1, -1, -1}, true};
    return id;
  }

  void init(Index a, Index b, Index c) {
    if (orient(a, b, c) < 0.0) std::swap(a, b);
    std::vector<BoundaryEdge> ring;
    const std::int32_t t0 = make_tri(a, b, c);
    // Fan out from a virtual cavity that is the complement of t0.
    const Index vs[3] = {a, b, c};
    for (int k = 0; k < 3; ++k) ring.push_back({vs[(k + 1) % 3], vs[k], t0});
    std::vector<std::int32_t> created;
    for (const auto& be : ring) created.push_back(make_tri(be.a, be.b, kGhost));
    link_fan(ring, created);
    last_ = t0;
  }

  // New triangles (a, b, apex) for every boundary edge; link them to each
  // other and to the outside triangle across (a, b).
  void link_fan(const std::vector<BoundaryEdge>& ring, const std::vector<std::int32_t>& created) {
    std::vector<std::pair<Index, std::int32_t>> by_first(ring.size()), by_second(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i) {
      by_first[i] = {ring[i].a, created[i]};
      by_second[i] = {ring[i].b, created[i]};
    }
    std::sort(by_first.begin(), by_first.end());
    std::sort(by_second.begin(), by_second.end());
    auto lookup = [](const std::vector<std::pair<Index, std::int32_t>>& m, Index key) {
      auto it = std::lower_bound(m.begin(), m.end(), std::make_pair(key, std::numeric_limits<std::int32_t>::min()));
      if (it == m.end() || it->first != key) throw InternalError("delaunay: cavity boundary is not a closed ring");
      return it->second;
    };
    for (std::size_t i = 0; i < ring.size(); ++i) {
      Tri& t = tris_[created[i]];
      t.n[2] = ring[i].outside;
      t.n[0] = lookup(by_first, ring[i].b);   // shares edge (b, apex)
      t.n[1] = lookup(by_second, ring[i].a);  // shares edge (apex, a)
      // Slots of the old cavity may already be reused, so match by the
      // shared edge rather than by the old triangle id.
      Tri& o = tris_[ring[i].outside];
      for (int k = 0; k < 3; ++k)
        if (o.v[(k + 1) % 3] == ring[i].b && o.v[(k + 2) % 3] == ring[i].a) o.n[k] = created[i];
    }
  }

  std::int32_t locate(Index p) const {
    std::int32_t t = last_;
    for (std::size_t step = 0;; ++step) {
      const Tri& tr = tris_[t];
      if (ghost(tr)) return t;
      bool moved = false;
      for (int j = 0; j < 3; ++j) {
        const int k = static_cast<int>((j + step) % 3);
        if (orient(tr.v[(k + 1) % 3], tr.v[(k + 2) % 3], p) < 0.0) {
          t = tr.n[k];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      if (step > 4 * tris_.size() + 16) throw InternalError("delaunay: point location did not terminate");
    }
  }

  void insert(Index p) {
    const std::int32_t start = locate(p);
    if (!conflict(start, p)) throw InternalError("delaunay: located triangle is not in conflict");
    ++stamp_;
    std::vector<std::int32_t> cavity{start}, stack{start};
    std::vector<BoundaryEdge> ring;
    mark_[start] = stamp_;
    while (!stack.empty()) {
      const std::int32_t t = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        const std::int32_t nb = tris_[t].n[k];
        if (mark_[nb] == stamp_) continue;
        if (conflict(nb, p)) {
          mark_[nb] = stamp_;
          stack.push_back(nb);
          cavity.push_back(nb);
        } else {
          ring.push_back({tris_[t].v[(k + 1) % 3], tris_[t].v[(k + 2) % 3], nb});
        }
      }
    }
    std::vector<std::int32_t> created;
    created.reserve(ring.size());
    for (std::int32_t t : cavity) {
      tris_[t].alive = false;
      free_.push_back(t);
    }
    for (const auto& be : ring) {
      const std::int32_t id = make_tri(be.a, be.b, p);
      mark_[id] = 0;
      created.push_back(id);
      if (be.a != kGhost && be.b != kGhost) last_ = id;
    }
    link_fan(ring, created);
  }

  DelaunayStructure collinear_chain() const {
    std::vector<Index> order(pts_.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return pts_[a].x != pts_[b].x ? pts_[a].x < pts_[b].x : pts_[a].y < pts_[b].y;
    });
    DelaunayStructure out;
    for (std::size_t i = 1; i < order.size(); ++i)
      out.edges.push_back({std::min(order[i - 1], order[i]), std::max(order[i - 1], order[i]), {-1, -1}});
    return out;
  }

  DelaunayStructure finish() const {
    std::vector<std::int32_t> remap(tris_.size(), -1);
    DelaunayStructure out;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive || ghost(tris_[t])) continue;
      remap[t] = static_cast<std::int32_t>(out.triangles.size());
      out.triangles.push_back({tris_[t].v[0], tris_[t].v[1], tris_[t].v[2]});
    }
    out.neighbors.resize(out.triangles.size());
    out.triangle_edges.resize(out.triangles.size());
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (remap[t] < 0) continue;
      for (int k = 0; k < 3; ++k) out.neighbors[remap[t]][k] = remap[tris_[t].n[k]];
    }
    for (std::size_t t = 0; t < out.triangles.size(); ++t) {
      for (int k = 0; k < 3; ++k) {
        const std::int32_t nb = out.neighbors[t][k];
        if (nb >= 0 && nb < static_cast<std::int32_t>(t)) continue;
        const Index a = out.triangles[t][(k + 1) % 3], b = out.triangles[t][(k + 2) % 3];
        const auto eid = static_cast<std::uint32_t>(out.edges.size());
        out.edges.push_back({std::min(a, b), std::max(a, b), {static_cast<std::int32_t>(t), nb}});
        out.triangle_edges[t][k] = eid;
        if (nb >= 0)
          for (int j = 0; j < 3; ++j)
            if (out.neighbors[nb][j] == static_cast<std::int32_t>(t)) out.triangle_edges[nb][j] = eid;
      }
    }
    return out;
  }

  std::vector<geom::Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<std::int32_t> free_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::int32_t last_ = 0;
};

}  // namespace detail

/// Delaunay triangulation of a planar cloud under exact predicates. All
/// collinear input yields no triangles and the sorted chain of edges.
inline DelaunayStructure delaunay(const PointCloud& cloud) {
  if (cloud.dim() != 2) throw ValidationError("delaunay requires a 2D cloud");
  cloud.require_distinct();
  return detail::Triangulator(cloud).run();
}

}  // namespace topoae
