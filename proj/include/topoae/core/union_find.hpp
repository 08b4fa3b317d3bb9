#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace topoae {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    rank_.assign(n, 0);
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::size_t size() const { return parent_.size(); }

  std::uint32_t find(std::uint32_t x) {
    std::uint32_t r = x;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[x] != r) x = std::exchange(parent_[x], r);
    return r;
  }

  bool same(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }

  /// Returns {surviving root, absorbed root}. Both equal when already joined,
  /// so callers can merge per-class payloads into the survivor.
  std::pair<std::uint32_t, std::uint32_t> unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return {a, a};
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return {a, b};
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace topoae
