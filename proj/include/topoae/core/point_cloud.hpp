#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "topoae/core/errors.hpp"

namespace topoae {

using Index = std::uint32_t;

/// Row-major point set in R^h. Row order defines point indices.
class PointCloud {
 public:
  PointCloud() = default;

  PointCloud(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0) throw ValidationError("point cloud dimension must be >= 1");
    if (coords_.size() % dim_ != 0) throw ValidationError("coordinate count is not a multiple of the dimension");
    for (double c : coords_)
      if (!std::isfinite(c)) throw ValidationError("point cloud contains a non-finite coordinate");
  }

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t h = rows.front().size();
    std::vector<double> c;
    c.reserve(rows.size() * h);
    for (const auto& r : rows) {
      if (r.size() != h) throw ValidationError("rows have inconsistent dimension");
      c.insert(c.end(), r.begin(), r.end());
    }
    return PointCloud(h, std::move(c));
  }

  std::size_t size() const { return dim_ ? coords_.size() / dim_ : 0; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return size() == 0; }

  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  double operator()(std::size_t i, std::size_t k) const { return coords_[i * dim_ + k]; }
  double& operator()(std::size_t i, std::size_t k) { return coords_[i * dim_ + k]; }

  const std::vector<double>& data() const { return coords_; }
  std::vector<double>& data() { return coords_; }

  double squared_distance(std::size_t i, std::size_t j) const {
    const double* a = coords_.data() + i * dim_;
    const double* b = coords_.data() + j * dim_;
    double s = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double d = a[k] - b[k];
      s += d * d;
    }
    return s;
  }

  // Every length comparison in the library goes through this function, so a
  // pair always gets the same double regardless of argument order.
  double distance(std::size_t i, std::size_t j) const {
    return i < j ? std::sqrt(squared_distance(i, j)) : std::sqrt(squared_distance(j, i));
  }

  void check_index(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("point index " + std::to_string(i) + " out of range");
  }

  bool has_duplicates() const {
    std::vector<Index> order(size());
    std::iota(order.begin(), order.end(), Index{0});
    auto row_less = [&](Index a, Index b) {
      return std::lexicographical_compare(coords_.begin() + a * dim_, coords_.begin() + (a + 1) * dim_,
                                          coords_.begin() + b * dim_, coords_.begin() + (b + 1) * dim_);
    };
    std::sort(order.begin(), order.end(), row_less);
    for (std::size_t k = 1; k < order.size(); ++k)
      if (!row_less(order[k - 1], order[k])) return true;
    return false;
  }

  void require_distinct() const {
    if (has_duplicates()) throw ValidationError("point cloud contains duplicate points");
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

struct Edge {
  Index u = 0;  // u < v
  Index v = 0;
  double length = 0.0;

  friend bool operator==(const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }
};

inline Edge make_edge(const PointCloud& c, Index a, Index b) {
  if (a > b) std::swap(a, b);
  return Edge{a, b, c.distance(a, b)};
}

/// Strict total order on edges: (length, min index, max index).
inline bool key_less(const Edge& a, const Edge& b) {
  if (a.length != b.length) return a.length < b.length;
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

inline std::uint64_t pair_code(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(a) << 32) | b;
}

/// Insertion-ordered set of undirected edges.
class EdgeSet {
 public:
  EdgeSet() = default;

  bool insert(const Edge& e) {
    if (e.u >= e.v) throw ValidationError("edge endpoints must satisfy u < v");
    if (!index_.insert(pair_code(e.u, e.v)).second) return false;
    edges_.push_back(e);
    return true;
  }
  void insert_all(const EdgeSet& other) {
    for (const Edge& e : other) insert(e);
  }

  bool contains(Index a, Index b) const { return index_.count(pair_code(a, b)) != 0; }
  bool contains(const Edge& e) const { return contains(e.u, e.v); }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  std::vector<Edge>::const_iterator begin() const { return edges_.begin(); }
  std::vector<Edge>::const_iterator end() const { return edges_.end(); }
  const Edge& operator[](std::size_t i) const { return edges_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::vector<Edge> sorted_by_key() const {
    std::vector<Edge> s = edges_;
    std::sort(s.begin(), s.end(), key_less);
    return s;
  }

  bool is_subset_of(const EdgeSet& other) const {
    return std::all_of(edges_.begin(), edges_.end(), [&](const Edge& e) { return other.contains(e); });
  }

  friend bool operator==(const EdgeSet& a, const EdgeSet& b) { return a.size() == b.size() && a.is_subset_of(b); }

 private:
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> index_;
};

inline EdgeSet set_difference(const EdgeSet& a, const EdgeSet& b) {
  EdgeSet out;
  for (const Edge& e : a)
    if (!b.contains(e)) out.insert(e);
  return out;
}

}  // namespace topoae
