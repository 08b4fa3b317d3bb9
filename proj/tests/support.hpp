#pragma once

// Shared helpers for the test suites: seeded cloud samplers and brute-force
// reference implementations that do not share code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <tuple>
#include <random>
#include <vector>

#include "topoae/core/point_cloud.hpp"

namespace testsupport {

using topoae::Index;
using topoae::PointCloud;

inline PointCloud uniform_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * dim);
  for (double& v : c) v = u(rng);
  return PointCloud(dim, std::move(c));
}

inline PointCloud clustered_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 0.04);
  const std::size_t k = 1 + n / 40;
  std::vector<double> centers(2 * k);
  for (double& v : centers) v = u(rng);
  std::vector<double> c;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = rng() % k;
    c.push_back(centers[2 * j] + g(rng));
    c.push_back(centers[2 * j + 1] + g(rng));
  }
  return PointCloud(2, std::move(c));
}

inline PointCloud noisy_circle(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> c;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = u(rng);
    c.push_back(std::cos(t) + g(rng));
    c.push_back(std::sin(t) + g(rng));
  }
  return PointCloud(2, std::move(c));
}

// Integer lattice subset: many equal distances and cocircular quadruples.
inline PointCloud grid_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(double(n) * 1.5)));
  std::vector<std::pair<int, int>> cells;
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j) cells.emplace_back(int(i), int(j));
  std::shuffle(cells.begin(), cells.end(), rng);
  cells.resize(std::min(n, cells.size()));
  std::vector<double> c;
  for (auto [i, j] : cells) {
    c.push_back(i);
    c.push_back(j);
  }
  return PointCloud(2, std::move(c));
}

inline PointCloud square() { return PointCloud(2, {0, 0, 1, 0, 1, 1, 0, 1}); }

inline PointCloud hexagon() {
  std::vector<double> c;
  for (int k = 0; k < 6; ++k) {
    c.push_back(std::cos(k * M_PI / 3.0));
    c.push_back(std::sin(k * M_PI / 3.0));
  }
  return PointCloud(2, std::move(c));
}

inline PointCloud counterexample_x() {
  return PointCloud(3, {1, 0, 0, 0.5, 0.866, 0, -0.48, 0.667, 0, -0.73, -0.199, 0.433, -0.48, -1.065, 0, 0.5, -0.866, 0});
}

inline PointCloud counterexample_z() {
  return PointCloud(2, {1, 0, 0.5, 0.866, -0.48, 0.667, -0.98, -0.199, -0.48, -1.065, 0.5, -0.866});
}

// Same planar picture as counterexample_z(), but vertex 3 is rotated about the
// line through vertices 2 and 4 (x = -0.48) into the plane exactly, so the
// spokes 3-2 and 3-4 keep their X lengths to machine precision.
inline PointCloud unfolded_counterexample_z() {
  const PointCloud x = counterexample_x();
  std::vector<double> c;
  for (Index i = 0; i < x.size(); ++i) {
    c.push_back(x(i, 0));
    c.push_back(x(i, 1));
  }
  c[6] = x(2, 0) - std::hypot(x(3, 0) - x(2, 0), x(3, 2));
  return PointCloud(2, std::move(c));
}

// Edge order used everywhere: (length, min index, max index).
struct Key {
  double len;
  Index a, b;
  bool operator<(const Key& o) const {
    if (len != o.len) return len < o.len;
    if (a != o.a) return a < o.a;
    return b < o.b;
  }
};

inline Key key(const PointCloud& c, Index i, Index j) {
  if (i > j) std::swap(i, j);
  return {c.distance(i, j), i, j};
}

// Quadratic Prim over the complete graph with the tie-broken order.
inline std::vector<std::pair<Index, Index>> prim_mst(const PointCloud& c) {
  const std::size_t n = c.size();
  std::vector<bool> in(n, false);
  std::vector<Key> best(n, Key{std::numeric_limits<double>::infinity(), 0, 0});
  std::vector<std::pair<Index, Index>> out;
  in[0] = true;
  for (Index j = 1; j < n; ++j) best[j] = key(c, 0, j);
  for (std::size_t step = 1; step < n; ++step) {
    Index pick = 0;
    bool found = false;
    for (Index j = 0; j < n; ++j)
      if (!in[j] && (!found || best[j] < best[pick])) {
        pick = j;
        found = true;
      }
    in[pick] = true;
    out.emplace_back(best[pick].a, best[pick].b);
    for (Index j = 0; j < n; ++j)
      if (!in[j] && key(c, pick, j) < best[j]) best[j] = key(c, pick, j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Relative neighborhood graph by checking every pair against every point.
inline std::vector<std::pair<Index, Index>> brute_rng(const PointCloud& c) {
  std::vector<std::pair<Index, Index>> out;
  for (Index a = 0; a < c.size(); ++a)
    for (Index b = a + 1; b < c.size(); ++b) {
      const Key ab = key(c, a, b);
      bool empty = true;
      for (Index x = 0; x < c.size() && empty; ++x)
        if (x != a && x != b && key(c, a, x) < ab && key(c, b, x) < ab) empty = false;
      if (empty) out.emplace_back(a, b);
    }
  return out;
}

template <class Set>
std::vector<std::pair<Index, Index>> sorted_pairs(const Set& s) {
  std::vector<std::pair<Index, Index>> out;
  for (const auto& e : s) out.emplace_back(e.u, e.v);
  std::sort(out.begin(), out.end());
  return out;
}

// Textbook boundary-matrix reduction over every edge and triangle of the
// complete complex. Simplices are ordered by the key of their longest edge,
// then dimension, then (for triangles sharing the longest edge) the key of
// the second longest edge. Returns dimension-1 pairs as (birth edge, death triangle)
// with distinct birth and death keys.
struct BrutePair {
  std::vector<Index> birth;
  std::vector<Index> death;
  double birth_value;
  double death_value;
  bool operator<(const BrutePair& o) const { return std::tie(birth, death) < std::tie(o.birth, o.death); }
  bool operator==(const BrutePair& o) const { return birth == o.birth && death == o.death; }
};

inline std::vector<BrutePair> brute_rips_dim1(const PointCloud& c, bool keep_zero = false) {
  const Index n = static_cast<Index>(c.size());
  struct Simplex {
    Key diam;
    int dim;
    Key second;  // triangles only
    std::vector<Index> v;
  };
  std::vector<Simplex> s;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b) s.push_back({key(c, a, b), 1, key(c, a, b), {a, b}});
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      for (Index d = b + 1; d < n; ++d) {
        Key ks[3] = {key(c, a, b), key(c, a, d), key(c, b, d)};
        std::sort(ks, ks + 3);
        s.push_back({ks[2], 2, ks[1], {a, b, d}});
      }
  std::sort(s.begin(), s.end(), [](const Simplex& x, const Simplex& y) {
    if (x.diam < y.diam) return true;
    if (y.diam < x.diam) return false;
    if (x.dim != y.dim) return x.dim < y.dim;
    return x.second < y.second;
  });
  std::map<std::vector<Index>, std::size_t> pos;
  for (std::size_t i = 0; i < s.size(); ++i) pos[s[i].v] = i;
  std::map<std::size_t, std::set<std::size_t>> by_low;
  std::vector<BrutePair> out;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j].dim != 2) continue;
    const auto& v = s[j].v;
    std::set<std::size_t> col = {pos[{v[0], v[1]}], pos[{v[0], v[2]}], pos[{v[1], v[2]}]};
    while (!col.empty()) {
      const std::size_t low = *col.rbegin();
      auto it = by_low.find(low);
      if (it == by_low.end()) break;
      for (std::size_t r : it->second)
        if (!col.erase(r)) col.insert(r);
    }
    if (col.empty()) continue;
    const std::size_t low = *col.rbegin();
    by_low[low] = col;
    const auto& e = s[low];
    const bool zero = !(e.diam < s[j].diam) && !(s[j].diam < e.diam);
    if (zero && !keep_zero) continue;
    out.push_back({e.v, v, e.diam.len, s[j].diam.len});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testsupport
