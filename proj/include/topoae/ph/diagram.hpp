#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include "topoae/core/point_cloud.hpp"
#include "topoae/core/union_find.hpp"

namespace topoae {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
  int dim = 0;
  std::vector<Index> birth_simplex;  // sorted vertex ids
  std::vector<Index> death_simplex;  // sorted vertex ids, empty when essential or unknown
  double birth = 0.0;
  double death = kInfinity;
  // Rips anchors: for dim 1 the birth edge and the key-longest edge of the
  // death triangle; for dim 0 the death edge only.
  Edge birth_edge{};
  Edge death_edge{};

  bool essential() const { return std::isinf(death); }
  double persistence() const { return death - birth; }
  /// Positive under the tie-broken order. Equal values can still occur on
  /// exactly tied distances.
  bool key_positive() const { return essential() || dim == 0 || !(birth_edge == death_edge); }
};

inline bool same_pair(const PersistencePair& a, const PersistencePair& b) {
  return a.dim == b.dim && a.birth_simplex == b.birth_simplex && a.death_simplex == b.death_simplex &&
         a.birth == b.birth && a.death == b.death;
}

struct DiagramPoint {
  double birth;
  double death;
};

class PersistenceDiagram {
 public:
  explicit PersistenceDiagram(int dim = 0) : dim_(dim) {}
  PersistenceDiagram(int dim, std::vector<PersistencePair> pairs) : dim_(dim), pairs_(std::move(pairs)) { sort(); }

  static PersistenceDiagram from_points(int dim, const std::vector<DiagramPoint>& pts) {
    PersistenceDiagram d(dim);
    for (const auto& p : pts) {
      if (!(p.birth <= p.death)) throw ValidationError("diagram point with death before birth");
      PersistencePair q;
      q.dim = dim;
      q.birth = p.birth;
      q.death = p.death;
      d.pairs_.push_back(q);
    }
    d.sort();
    return d;
  }

  int dim() const { return dim_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::vector<PersistencePair>& pairs() const { return pairs_; }
  const PersistencePair& operator[](std::size_t i) const { return pairs_[i]; }

  void add(PersistencePair p) { pairs_.push_back(std::move(p)); }

  /// Ascending birth, then death, then simplices.
  void sort() {
    std::sort(pairs_.begin(), pairs_.end(), [](const PersistencePair& a, const PersistencePair& b) {
      return std::tie(a.birth, a.death, a.birth_simplex, a.death_simplex) <
             std::tie(b.birth, b.death, b.birth_simplex, b.death_simplex);
    });
  }

  std::vector<DiagramPoint> points() const {
    std::vector<DiagramPoint> out;
    out.reserve(pairs_.size());
    for (const auto& p : pairs_) out.push_back({p.birth, p.death});
    return out;
  }

  std::size_t essential_count() const {
    return std::count_if(pairs_.begin(), pairs_.end(), [](const PersistencePair& p) { return p.essential(); });
  }

 private:
  int dim_;
  std::vector<PersistencePair> pairs_;
};

struct RipsDiagrams {
  PersistenceDiagram dgm0{0};
  PersistenceDiagram dgm1{1};

  const PersistenceDiagram& operator[](int k) const { return k == 0 ? dgm0 : dgm1; }
};

/// Dgm0 read off a spanning tree listed in key order, with the elder rule:
/// the merging component whose smallest vertex index is larger dies.
inline PersistenceDiagram dgm0_from_mst(const PointCloud& c, const std::vector<Edge>& mst_in_order) {
  std::vector<PersistencePair> pairs;
  if (c.empty()) return PersistenceDiagram(0);
  UnionFind uf(c.size());
  std::vector<Index> oldest(c.size());
  for (Index i = 0; i < c.size(); ++i) oldest[i] = i;
  for (const Edge& e : mst_in_order) {
    const Index a = oldest[uf.find(e.u)], b = oldest[uf.find(e.v)];
    const auto [root, absorbed] = uf.unite(e.u, e.v);
    if (root == absorbed) throw InternalError("spanning tree contains a cycle");
    oldest[root] = std::min(a, b);
    PersistencePair p;
    p.dim = 0;
    p.birth_simplex = {std::max(a, b)};
    p.death_simplex = {e.u, e.v};
    p.birth = 0.0;
    p.death = e.length;
    p.death_edge = e;
    pairs.push_back(std::move(p));
  }
  if (pairs.size() + 1 != c.size()) throw InternalError("spanning tree does not connect the cloud");
  PersistencePair ess;
  ess.dim = 0;
  ess.birth_simplex = {0};
  pairs.push_back(std::move(ess));
  return PersistenceDiagram(0, std::move(pairs));
}

}  // namespace topoae
