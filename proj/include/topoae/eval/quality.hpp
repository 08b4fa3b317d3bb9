#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "topoae/core/errors.hpp"
#include "topoae/core/point_cloud.hpp"
#include "topoae/diagrams/metric.hpp"
#include "topoae/util/parallel.hpp"

namespace topoae {

namespace detail {

inline void check_same_size(const PointCloud& x, const PointCloud& z, const char* what) {
  if (x.size() != z.size()) throw ValidationError(std::string(what) + ": X and Z have different sizes");
}

inline int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace detail

/// sqrt((1/n) * sum over i<j of (|X_i - X_j| - |Z_i - Z_j|)^2).
inline double metric_distortion(const PointCloud& x, const PointCloud& z) {
  detail::check_same_size(x, z, "metric distortion");
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  double s = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double r = x.distance(i, j) - z.distance(i, j);
      s += r * r;
    }
  return std::sqrt(s / static_cast<double>(n));
}

/// Pearson correlation between the pairwise distances of X and Z. NaN when
/// either side has constant distances.
inline double linear_correlation(const PointCloud& x, const PointCloud& z) {
  detail::check_same_size(x, z, "linear correlation");
  const std::size_t n = x.size();
  double sx = 0, sz = 0, sxx = 0, szz = 0, sxz = 0, m = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double a = x.distance(i, j), b = z.distance(i, j);
      sx += a;
      sz += b;
      sxx += a * a;
      szz += b * b;
      sxz += a * b;
      m += 1;
    }
  if (m == 0) return std::numeric_limits<double>::quiet_NaN();
  const double cov = sxz - sx * sz / m, vx = sxx - sx * sx / m, vz = szz - sz * sz / m;
  if (vx <= 0 || vz <= 0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(cov / std::sqrt(vx * vz), -1.0, 1.0);
}

/// True when the three sides of triangle ijk have the same relative order
/// in X and Z (ties included).
inline bool triplet_agrees(const PointCloud& x, const PointCloud& z, Index i, Index j, Index k) {
  const double a = x.distance(i, j), b = x.distance(i, k), c = x.distance(j, k);
  const double p = z.distance(i, j), q = z.distance(i, k), r = z.distance(j, k);
  using detail::sign;
  return sign(a - b) == sign(p - q) && sign(a - c) == sign(p - r) && sign(b - c) == sign(q - r);
}

/// Number of triples used when no sample size is given: all of them up to
/// 300 points, else 100 per point.
inline std::uint64_t default_triplet_samples(std::size_t n) {
  const std::uint64_t all = n < 3 ? 0 : std::uint64_t(n) * (n - 1) * (n - 2) / 6;
  return n <= 300 ? all : std::min<std::uint64_t>(all, 100 * std::uint64_t(n));
}

/// Fraction of vertex triples whose edge order agrees in X and Z. A sample
/// size of 0 picks default_triplet_samples(n); a sample size at least the
/// number of triples enumerates them all. Sampling draws distinct vertices
/// with a seeded generator.
inline double triplet_accuracy(const PointCloud& x, const PointCloud& z, std::uint64_t sample_size = 0,
                               std::uint64_t seed = 0) {
  detail::check_same_size(x, z, "triplet accuracy");
  const std::size_t n = x.size();
  if (n < 3) throw ValidationError("triplet accuracy needs at least 3 points");
  const std::uint64_t all = std::uint64_t(n) * (n - 1) * (n - 2) / 6;
  if (sample_size == 0) sample_size = default_triplet_samples(n);
  std::uint64_t good = 0, total = 0;
  if (sample_size >= all) {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        for (Index k = j + 1; k < n; ++k) good += triplet_agrees(x, z, i, j, k);
    total = all;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> pick(0, static_cast<Index>(n - 1));
    for (std::uint64_t s = 0; s < sample_size; ++s) {
      Index i = pick(rng), j = pick(rng), k = pick(rng);
      while (j == i) j = pick(rng);
      while (k == i || k == j) k = pick(rng);
      good += triplet_agrees(x, z, i, j, k);
    }
    total = sample_size;
  }
  return static_cast<double>(good) / static_cast<double>(total);
}

/// ranks[i][j]: position of j among the neighbors of i sorted by distance
/// (ties by index), starting at 1. ranks[i][i] = 0.
inline std::vector<std::vector<std::uint32_t>> neighbor_ranks(const PointCloud& c, unsigned threads = 1) {
  const std::size_t n = c.size();
  std::vector<std::vector<std::uint32_t>> ranks(n, std::vector<std::uint32_t>(n, 0));
  parallel_for(0, n, threads, [&](std::size_t i) {
    std::vector<std::pair<double, Index>> d;
    d.reserve(n - 1);
    for (Index j = 0; j < n; ++j)
      if (j != i) d.push_back({c.distance(i, j), j});
    std::sort(d.begin(), d.end());
    for (std::size_t r = 0; r < d.size(); ++r) ranks[i][d[r].second] = static_cast<std::uint32_t>(r + 1);
  });
  return ranks;
}

struct TrustContinuity {
  double trust = 1.0;
  double cont = 1.0;
};

/// Rank-based trustworthiness and continuity at K neighbors.
inline TrustContinuity trust_continuity(const PointCloud& x, const PointCloud& z, int k = 10, unsigned threads = 1) {
  detail::check_same_size(x, z, "trust/continuity");
  const double n = static_cast<double>(x.size());
  if (k < 1) throw ValidationError("trust/continuity: K must be >= 1");
  const double norm = n * k * (2 * n - 3 * k - 1);
  if (!(norm > 0)) throw ValidationError("trust/continuity: K too large for the cloud size");
  const auto rx = neighbor_ranks(x, threads), rz = neighbor_ranks(z, threads);
  double t = 0, c = 0;
  const auto kk = static_cast<std::uint32_t>(k);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i == j) continue;
      if (rz[i][j] <= kk && rx[i][j] > kk) t += rx[i][j] - static_cast<double>(k);
      if (rx[i][j] <= kk && rz[i][j] > kk) c += rz[i][j] - static_cast<double>(k);
    }
  return {1.0 - 2.0 * t / norm, 1.0 - 2.0 * c / norm};
}

struct QualityOptions {
  int k = 10;
  std::uint64_t triplet_samples = 0;  // 0 = default policy
  std::uint64_t seed = 0;
  unsigned threads = 1;
  WassersteinOptions wasserstein;
  DiagramEngineOptions engine;
};

struct QualityReport {
  double mw0 = 0, mw1 = 0, md = 0, lc = 0, ta = 0, trust = 0, cont = 0;
  int k = 10;
  std::map<std::string, double> seconds;  // wall time per stage
};

inline QualityReport quality_report(const PointCloud& x, const PointCloud& z, const QualityOptions& opt = {}) {
  detail::check_same_size(x, z, "quality report");
  QualityReport q;
  q.k = opt.k;
  using Clock = std::chrono::steady_clock;
  auto timed = [&](const char* name, auto&& f) {
    const auto t0 = Clock::now();
    f();
    q.seconds[name] = std::chrono::duration<double>(Clock::now() - t0).count();
  };
  timed("diagrams", [&] {
    const auto dx = diagrams_of(x, 1, opt.engine), dz = diagrams_of(z, 1, opt.engine);
    q.mw0 = wasserstein(dx.dgm0, dz.dgm0, opt.wasserstein).distance;
    q.mw1 = wasserstein(dx.dgm1, dz.dgm1, opt.wasserstein).distance;
  });
  timed("distances", [&] {
    q.md = metric_distortion(x, z);
    q.lc = linear_correlation(x, z);
  });
  timed("triplets", [&] { q.ta = triplet_accuracy(x, z, opt.triplet_samples, opt.seed); });
  timed("ranks", [&] {
    const auto tc = trust_continuity(x, z, opt.k, opt.threads);
    q.trust = tc.trust;
    q.cont = tc.cont;
  });
  return q;
}

}  // namespace topoae
