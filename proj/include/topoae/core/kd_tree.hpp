#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "topoae/core/point_cloud.hpp"

namespace topoae {

/// Static 2D k-d tree over a subset of a planar cloud. The tree is implicit:
/// the median of every index range is the splitting point.
class KdTree2 {
 public:
  KdTree2() = default;

  KdTree2(const PointCloud& cloud, std::vector<Index> ids) : ids_(std::move(ids)) {
    if (cloud.dim() != 2) throw ValidationError("k-d tree requires a 2D cloud");
    pts_.resize(ids_.size());
    for (std::size_t k = 0; k < ids_.size(); ++k) pts_[k] = {cloud(ids_[k], 0), cloud(ids_[k], 1)};
    build(0, ids_.size(), 0);
  }

  explicit KdTree2(const PointCloud& cloud) : KdTree2(cloud, all_indices(cloud.size())) {}

  std::size_t size() const { return ids_.size(); }

  /// Calls f(id) for every point with squared distance <= r2 from (cx, cy)
  /// until f returns true. Returns whether some call returned true.
  template <class F>
  bool visit_disk(double cx, double cy, double r2, F&& f) const {
    if (ids_.empty()) return false;
    return visit(0, ids_.size(), 0, cx, cy, r2, f);
  }

  template <class F>
  void for_each_in_disk(double cx, double cy, double r2, F&& f) const {
    visit_disk(cx, cy, r2, [&](Index id) {
      f(id);
      return false;
    });
  }

 private:
  static constexpr std::size_t kLeaf = 8;

  struct Entry {
    std::array<double, 2> p;
    Index id;
  };

  static std::vector<Index> all_indices(std::size_t n) {
    std::vector<Index> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Index>(i);
    return v;
  }

  void build(std::size_t lo, std::size_t hi, int axis) {
    if (hi - lo <= kLeaf) return;
    const std::size_t mid = (lo + hi) / 2;
    std::vector<Entry> tmp(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) tmp[k - lo] = {pts_[k], ids_[k]};
    std::nth_element(tmp.begin(), tmp.begin() + (mid - lo), tmp.end(),
                     [axis](const Entry& a, const Entry& b) { return a.p[axis] < b.p[axis]; });
    for (std::size_t k = lo; k < hi; ++k) {
      pts_[k] = tmp[k - lo].p;
      ids_[k] = tmp[k - lo].id;
    }
    build(lo, mid, 1 - axis);
    build(mid + 1, hi, 1 - axis);
  }

  template <class F>
  bool visit(std::size_t lo, std::size_t hi, int axis, double cx, double cy, double r2, F& f) const {
    if (hi - lo <= kLeaf) {
      for (std::size_t k = lo; k < hi; ++k) {
        const double dx = pts_[k][0] - cx, dy = pts_[k][1] - cy;
        if (dx * dx + dy * dy <= r2 && f(ids_[k])) return true;
      }
      return false;
    }
    const std::size_t mid = (lo + hi) / 2;
    const double dx = pts_[mid][0] - cx, dy = pts_[mid][1] - cy;
    if (dx * dx + dy * dy <= r2 && f(ids_[mid])) return true;
    const double diff = (axis == 0 ? cx : cy) - pts_[mid][axis];
    const bool left_first = diff <= 0.0;
    if (left_first || diff * diff <= r2)
      if (visit(lo, mid, 1 - axis, cx, cy, r2, f)) return true;
    if (!left_first || diff * diff <= r2)
      if (visit(mid + 1, hi, 1 - axis, cx, cy, r2, f)) return true;
    return false;
  }

  std::vector<Index> ids_;
  std::vector<std::array<double, 2>> pts_;
};

}  // namespace topoae
