#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "topoae/core/graphs.hpp"
#include "topoae/core/point_cloud.hpp"
#include "topoae/core/union_find.hpp"
#include "topoae/ph/diagram.hpp"

namespace topoae {

enum class ReductionKind { Cohomology, Homology };

struct RipsOptions {
  std::size_t max_points = 3000;
  bool apparent_pairs = true;
  bool include_zero_persistence = false;
  ReductionKind reduction = ReductionKind::Cohomology;
};

/// Rips 2-skeleton of a cloud under the tie-broken order. Edges are ranked
/// by key. Triangles are ranked by the rank of their longest edge, then by
/// the rank of their second longest edge; the order depends only on the
/// edge order, so it is invariant under relabeling of generic clouds.
class RipsFiltration {
 public:
  static constexpr std::int32_t kUnknown = -2;

  RipsFiltration(const PointCloud& c, std::size_t max_points = 3000) : cloud_(&c), n_(c.size()) {
    if (n_ == 0) throw ValidationError("rips filtration of an empty cloud");
    if (n_ > max_points)
      throw ValidationError("cloud has " + std::to_string(n_) + " points; the full-complex reduction is capped at " +
                            std::to_string(max_points) + " (raise max_points or use the planar engine)");
    edges_.reserve(n_ * (n_ - 1) / 2);
    for (Index i = 0; i < n_; ++i)
      for (Index j = i + 1; j < n_; ++j) edges_.push_back(make_edge(c, i, j));
    std::sort(edges_.begin(), edges_.end(), key_less);
    rank_.assign(n_ * n_, 0);
    // Incident edges of every vertex in rank order, filled by one sweep.
    by_vertex_.assign(n_ * (n_ - 1), 0);
    std::vector<std::size_t> fill(n_, 0);
    for (std::uint32_t r = 0; r < edges_.size(); ++r) {
      const Index u = edges_[r].u, v = edges_[r].v;
      rank_[u * n_ + v] = r;
      rank_[v * n_ + u] = r;
      by_vertex_[u * (n_ - 1) + fill[u]++] = r;
      by_vertex_[v * (n_ - 1) + fill[v]++] = r;
    }
    apparent_.assign(edges_.size(), kUnknown);
    stamp_.assign(n_, 0);
    in_mst_.assign(edges_.size(), 0);
    UnionFind uf(n_);
    for (std::uint32_t r = 0; r < edges_.size() && mst_.size() + 1 < n_; ++r) {
      const auto [root, absorbed] = uf.unite(edges_[r].u, edges_[r].v);
      if (root != absorbed) {
        in_mst_[r] = 1;
        mst_.push_back(edges_[r]);
      }
    }
  }

  const PointCloud& cloud() const { return *cloud_; }
  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(std::uint32_t r) const { return edges_[r]; }
  std::uint32_t rank(Index a, Index b) const { return rank_[a * n_ + b]; }
  bool in_mst(std::uint32_t r) const { return in_mst_[r] != 0; }
  const std::vector<Edge>& mst() const { return mst_; }

  std::uint64_t triangle_id(Index a, Index b, Index c) const {
    std::array<std::uint32_t, 3> r{rank(a, b), rank(a, c), rank(b, c)};
    std::sort(r.begin(), r.end());
    return make_id(r[2], r[1]);
  }

  /// Id of the triangle spanned by edge r and a vertex x of its lens.
  std::uint64_t lens_triangle(std::uint32_t r, Index x) const {
    return make_id(r, std::max(rank(edges_[r].u, x), rank(edges_[r].v, x)));
  }

  std::uint32_t longest(std::uint64_t id) const { return static_cast<std::uint32_t>(id / edges_.size()); }
  std::uint32_t second(std::uint64_t id) const { return static_cast<std::uint32_t>(id % edges_.size()); }

  Index third(std::uint64_t id) const {
    const Edge& e = edges_[longest(id)];
    const Edge& s = edges_[second(id)];
    return (s.u == e.u || s.u == e.v) ? s.v : s.u;
  }

  std::array<Index, 3> vertices(std::uint64_t id) const {
    const Edge& e = edges_[longest(id)];
    std::array<Index, 3> v{e.u, e.v, third(id)};
    std::sort(v.begin(), v.end());
    return v;
  }

  std::array<std::uint32_t, 3> boundary(std::uint64_t id) const {
    const std::uint32_t r = longest(id);
    const Index x = third(id);
    return {r, rank(edges_[r].u, x), rank(edges_[r].v, x)};
  }

  /// Lens vertex of edge r whose triangle comes first, or -1 when the lens
  /// is empty. Cached lazily; not safe for concurrent use.
  std::int32_t apparent_vertex(std::uint32_t r) const {
    if (apparent_[r] != kUnknown) return apparent_[r];
    // Merge the rank-ordered incidences of both endpoints below r; the first
    // vertex reached from both sides minimizes the second longest edge.
    const Index a = edges_[r].u, b = edges_[r].v;
    const std::uint32_t* la = &by_vertex_[a * (n_ - 1)];
    const std::uint32_t* lb = &by_vertex_[b * (n_ - 1)];
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    std::int32_t found = -1;
    std::size_t i = 0, j = 0;
    while (i < n_ - 1 || j < n_ - 1) {
      const bool take_a = j >= n_ - 1 || (i < n_ - 1 && la[i] < lb[j]);
      const std::uint32_t e = take_a ? la[i++] : lb[j++];
      if (e >= r) break;
      const Index x = take_a ? other(e, a) : other(e, b);
      if (stamp_[x] == epoch_) {
        found = static_cast<std::int32_t>(x);
        break;
      }
      stamp_[x] = epoch_;
    }
    apparent_[r] = found;
    return found;
  }

  /// Earliest cofacet of edge r when it has the same diameter as r. Such a
  /// triangle and r always form an apparent pair.
  std::optional<std::uint64_t> apparent_cofacet(std::uint32_t r) const {
    const std::int32_t x = apparent_vertex(r);
    if (x < 0) return std::nullopt;
    return lens_triangle(r, static_cast<Index>(x));
  }

  /// Calls f(triangle id) for every triangle containing edge r.
  template <class F>
  void for_each_cofacet(std::uint32_t r, F&& f) const {
    const Index a = edges_[r].u, b = edges_[r].v;
    for (Index x = 0; x < n_; ++x) {
      if (x == a || x == b) continue;
      std::array<std::uint32_t, 3> k{r, rank(a, x), rank(b, x)};
      std::sort(k.begin(), k.end());
      f(make_id(k[2], k[1]));
    }
  }

 private:
  std::uint64_t make_id(std::uint32_t longest, std::uint32_t second) const {
    return std::uint64_t(longest) * edges_.size() + second;
  }
  Index other(std::uint32_t e, Index v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }

  const PointCloud* cloud_;
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint32_t> by_vertex_;
  mutable std::vector<std::int32_t> apparent_;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t epoch_ = 0;
  std::vector<std::uint8_t> in_mst_;
  std::vector<Edge> mst_;
};

struct ReducedPair {
  std::uint32_t edge;       // birth edge rank
  std::uint64_t triangle;   // death triangle id
};

namespace detail {

using TriangleHeap = std::priority_queue<std::uint64_t, std::vector<std::uint64_t>, std::greater<>>;

// Earliest surviving entry of a heap holding a mod-2 sum; equal entries
// cancel in pairs.
inline std::optional<std::uint64_t> heap_pivot(TriangleHeap& heap) {
  while (!heap.empty()) {
    const std::uint64_t t = heap.top();
    heap.pop();
    if (!heap.empty() && heap.top() == t) {
      heap.pop();
      continue;
    }
    heap.push(t);
    return t;
  }
  return std::nullopt;
}

inline std::vector<std::uint32_t> mod2_normalize(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    if ((j - i) % 2 == 1) out.push_back(v[i]);
    i = j;
  }
  return out;
}

}  // namespace detail

/// Dimension-1 pairs by reduction of the edge coboundary matrix, columns in
/// decreasing filtration order, spanning-tree columns cleared.
inline std::vector<ReducedPair> reduce_cohomology(const RipsFiltration& f, bool apparent_shortcut = true) {
  std::vector<ReducedPair> out;
  std::unordered_map<std::uint64_t, std::uint32_t> owner;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> chains;
  for (std::size_t k = f.edge_count(); k-- > 0;) {
    const auto r = static_cast<std::uint32_t>(k);
    if (f.in_mst(r)) continue;
    if (apparent_shortcut) {
      if (const auto t = f.apparent_cofacet(r)) {
        out.push_back({r, *t});
        continue;
      }
    }
    detail::TriangleHeap heap;
    std::vector<std::uint32_t> chain{r};
    f.for_each_cofacet(r, [&](std::uint64_t t) { heap.push(t); });
    for (;;) {
      const auto pivot = detail::heap_pivot(heap);
      if (!pivot) throw InternalError("edge column reduced to zero; a complete Rips complex has no essential 1-cycles");
      std::optional<std::uint32_t> by;
      if (const auto it = owner.find(*pivot); it != owner.end()) {
        by = it->second;
      } else if (apparent_shortcut) {
        const std::uint32_t lr = f.longest(*pivot);
        if (lr != r && f.apparent_cofacet(lr) == *pivot) by = lr;
      }
      if (!by) {
        out.push_back({r, *pivot});
        owner.emplace(*pivot, r);
        chains.emplace(r, detail::mod2_normalize(std::move(chain)));
        break;
      }
      const auto it = chains.find(*by);
      const std::vector<std::uint32_t> single{*by};
      for (std::uint32_t s : it != chains.end() ? it->second : single) {
        chain.push_back(s);
        f.for_each_cofacet(s, [&](std::uint64_t t) { heap.push(t); });
      }
    }
  }
  return out;
}

/// Plain reduction of the triangle boundary matrix in filtration order. Used
/// as an independent reference on small clouds.
inline std::vector<ReducedPair> reduce_homology(const RipsFiltration& f, bool apparent_shortcut = false) {
  std::vector<ReducedPair> out;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> reduced;  // by pivot edge
  const std::size_t n = f.size();
  for (std::uint32_t r = 0; r < f.edge_count(); ++r) {
    const Index a = f.edge(r).u, b = f.edge(r).v;
    std::vector<std::uint64_t> cofacets;
    for (Index x = 0; x < n; ++x)
      if (x != a && x != b && f.rank(a, x) < r && f.rank(b, x) < r) cofacets.push_back(f.lens_triangle(r, x));
    std::sort(cofacets.begin(), cofacets.end());
    for (const std::uint64_t t : cofacets) {
      auto bd = f.boundary(t);
      std::vector<std::uint32_t> col(bd.begin(), bd.end());
      std::sort(col.begin(), col.end());
      if (apparent_shortcut && f.apparent_cofacet(r) == t) {
        out.push_back({r, t});
        reduced.emplace(r, std::move(col));
        continue;
      }
      while (!col.empty()) {
        const auto it = reduced.find(col.back());
        if (it == reduced.end()) break;
        std::vector<std::uint32_t> sum;
        std::set_symmetric_difference(col.begin(), col.end(), it->second.begin(), it->second.end(),
                                      std::back_inserter(sum));
        col.swap(sum);
      }
      if (col.empty()) continue;
      out.push_back({col.back(), t});
      reduced.emplace(col.back(), std::move(col));
    }
  }
  return out;
}

inline PersistencePair make_dim1_pair(const RipsFiltration& f, std::uint32_t edge, std::uint64_t triangle) {
  PersistencePair p;
  p.dim = 1;
  p.birth_edge = f.edge(edge);
  p.death_edge = f.edge(f.longest(triangle));
  p.birth_simplex = {p.birth_edge.u, p.birth_edge.v};
  const auto v = f.vertices(triangle);
  p.death_simplex.assign(v.begin(), v.end());
  p.birth = p.birth_edge.length;
  p.death = p.death_edge.length;
  return p;
}

inline RipsDiagrams rips_persistence(const RipsFiltration& f, int max_dim = 1, const RipsOptions& opt = {}) {
  if (max_dim < 0 || max_dim > 1) throw ValidationError("max_dim must be 0 or 1");
  RipsDiagrams out;
  out.dgm0 = dgm0_from_mst(f.cloud(), f.mst());
  if (max_dim == 0) return out;
  const auto pairs = opt.reduction == ReductionKind::Cohomology ? reduce_cohomology(f, opt.apparent_pairs)
                                                                 : reduce_homology(f, opt.apparent_pairs);
  std::vector<PersistencePair> dgm;
  for (const auto& rp : pairs) {
    if (!opt.include_zero_persistence && f.longest(rp.triangle) == rp.edge) continue;
    dgm.push_back(make_dim1_pair(f, rp.edge, rp.triangle));
  }
  out.dgm1 = PersistenceDiagram(1, std::move(dgm));
  return out;
}

/// Rips persistence in any ambient dimension. Dgm0 comes from the spanning
/// tree; Dgm1 from the reduction selected in `opt`.
inline RipsDiagrams rips_persistence(const PointCloud& c, int max_dim = 1, const RipsOptions& opt = {}) {
  if (c.empty()) throw ValidationError("rips persistence of an empty cloud");
  if (max_dim == 0) {
    RipsDiagrams out;
    out.dgm0 = dgm0_from_mst(c, mst_highdim(c).edges());
    return out;
  }
  const RipsFiltration f(c, opt.max_points);
  return rips_persistence(f, max_dim, opt);
}

/// Pairs with positive persistence (under the tie-broken order), ascending
/// by death in filtration order. Essential pairs are excluded.
inline std::vector<PersistencePair> positive_pairs(const RipsFiltration& f, int k) {
  const RipsDiagrams d = rips_persistence(f, k);
  std::vector<std::pair<std::uint64_t, PersistencePair>> keyed;
  for (const auto& p : d[k].pairs()) {
    if (p.essential() || !p.key_positive()) continue;
    const std::uint64_t order = k == 0 ? f.rank(p.death_edge.u, p.death_edge.v)
                                       : f.triangle_id(p.death_simplex[0], p.death_simplex[1], p.death_simplex[2]);
    keyed.emplace_back(order, p);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<PersistencePair> out;
  for (auto& kp : keyed) out.push_back(std::move(kp.second));
  return out;
}

inline std::vector<PersistencePair> positive_pairs(const PointCloud& c, int k, std::size_t max_points = 3000) {
  if (c.size() < 2 || (k == 1 && c.size() < 3)) return {};
  const RipsFiltration f(c, max_points);
  return positive_pairs(f, k);
}

struct CascadeRecord {
  PersistencePair pair;
  std::vector<std::array<Index, 3>> triangles;  // the 2-chain cascade
  EdgeSet skeleton;                             // edges of its triangles
  EdgeSet generator;                            // its boundary 1-cycle
};

/// Cascades of positive dimension-1 pairs by homologous propagation from
/// each death triangle until the youngest boundary edge is the birth edge.
inline std::vector<CascadeRecord> cascades(const RipsFiltration& f, std::vector<PersistencePair> pairs) {
  struct Work {
    std::uint32_t birth;
    std::uint64_t death;
    std::vector<std::uint64_t> chain;
    std::vector<std::uint32_t> cycle;
  };
  std::vector<Work> work;
  for (const auto& p : pairs) {
    if (p.dim != 1 || p.essential()) throw ValidationError("cascades take finite dimension-1 pairs");
    work.push_back({f.rank(p.birth_simplex[0], p.birth_simplex[1]),
                    f.triangle_id(p.death_simplex[0], p.death_simplex[1], p.death_simplex[2]), {}, {}});
  }
  std::vector<std::size_t> order(work.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return work[a].death < work[b].death; });

  const std::size_t n = f.size();
  const std::size_t cap = n < 3 ? 1 : n * (n - 1) * (n - 2) / 6;
  std::unordered_map<std::uint32_t, std::size_t> done_by_birth;
  for (std::size_t w : order) {
    Work& cur = work[w];
    std::unordered_set<std::uint64_t> chain;
    std::set<std::uint32_t> cycle;
    auto toggle_edge = [&](std::uint32_t e) {
      if (!cycle.erase(e)) cycle.insert(e);
    };
    auto add_triangle = [&](std::uint64_t t) {
      if (!chain.erase(t)) chain.insert(t);
      for (std::uint32_t e : f.boundary(t)) toggle_edge(e);
    };
    add_triangle(cur.death);
    for (std::size_t steps = 0;; ++steps) {
      if (steps > cap) throw InternalError("cascade propagation exceeded the triangle count");
      if (cycle.empty()) throw InternalError("cascade boundary vanished before reaching the birth edge");
      const std::uint32_t y = *cycle.rbegin();
      if (y == cur.birth) break;
      if (const auto t = f.apparent_cofacet(y)) {
        add_triangle(*t);
      } else if (const auto it = done_by_birth.find(y); it != done_by_birth.end()) {
        const Work& prev = work[it->second];
        for (std::uint64_t t : prev.chain)
          if (!chain.erase(t)) chain.insert(t);
        for (std::uint32_t e : prev.cycle) toggle_edge(e);
      } else {
        throw InternalError("cascade reached an edge that is neither apparent nor an earlier birth edge");
      }
    }
    cur.chain.assign(chain.begin(), chain.end());
    std::sort(cur.chain.begin(), cur.chain.end());
    cur.cycle.assign(cycle.begin(), cycle.end());
    done_by_birth.emplace(cur.birth, w);
  }

  std::vector<CascadeRecord> out;
  for (std::size_t w = 0; w < work.size(); ++w) {
    CascadeRecord rec;
    rec.pair = pairs[w];
    for (std::uint64_t t : work[w].chain) {
      rec.triangles.push_back(f.vertices(t));
      for (std::uint32_t e : f.boundary(t)) rec.skeleton.insert(f.edge(e));
    }
    for (std::uint32_t e : work[w].cycle) rec.generator.insert(f.edge(e));
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<CascadeRecord> cascades(const PointCloud& c, std::vector<PersistencePair> pairs,
                                           std::size_t max_points = 3000) {
  const RipsFiltration f(c, max_points);
  return cascades(f, std::move(pairs));
}

/// Global cascade skeleton: MST for d = 0, plus every cascade 1-skeleton of
/// the positive dimension-1 pairs for d = 1.
inline EdgeSet skeleton_gcs(const RipsFiltration& f, int d) {
  EdgeSet out;
  for (const Edge& e : f.mst()) out.insert(e);
  if (d == 0) return out;
  for (const auto& rec : cascades(f, positive_pairs(f, 1))) out.insert_all(rec.skeleton);
  return out;
}

inline EdgeSet skeleton_gcs(const PointCloud& c, int d, std::size_t max_points = 3000) {
  if (d == 0) return mst_highdim(c);
  const RipsFiltration f(c, max_points);
  return skeleton_gcs(f, d);
}

/// Edges creating or killing a positive class up to dimension d.
inline EdgeSet critical_edges(const RipsFiltration& f, int d) {
  EdgeSet out;
  for (const Edge& e : f.mst()) out.insert(e);
  if (d == 0) return out;
  for (const auto& p : positive_pairs(f, 1)) {
    out.insert(p.birth_edge);
    out.insert(p.death_edge);
  }
  return out;
}

inline EdgeSet critical_edges(const PointCloud& c, int d, std::size_t max_points = 3000) {
  if (d == 0) return mst_highdim(c);
  const RipsFiltration f(c, max_points);
  return critical_edges(f, d);
}

}  // namespace topoae
