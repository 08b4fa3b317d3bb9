#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <numbers>
#include <vector>

#include "topoae/diagrams/metric.hpp"
#include "topoae/diagrams/wasserstein.hpp"
#include "topoae/losses/losses.hpp"
#include "topoae/ph/planar.hpp"
#include "topoae/ph/rips.hpp"

namespace topoae {

struct VerifyOptions {
  int clouds = 200;       // random planar clouds for the engine comparison
  long max_n = 300;
  int gradient_configs = 10;
  int diagram_pairs = 50;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::string detail;  // first failure
  double seconds = 0.0;
};

namespace detail {

// Mix of uniform, clustered, noisy-circle and lattice clouds.
inline PointCloud verify_cloud(std::size_t i, long n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> c;
  switch (i % 4) {
    case 0:
      for (long k = 0; k < 2 * n; ++k) c.push_back(u(rng));
      break;
    case 1: {
      const long m = 1 + n / 40;
      std::vector<double> centers(2 * m);
      for (double& v : centers) v = u(rng);
      for (long k = 0; k < n; ++k) {
        const long j = static_cast<long>(rng() % m);
        c.push_back(centers[2 * j] + 0.04 * g(rng));
        c.push_back(centers[2 * j + 1] + 0.04 * g(rng));
      }
      break;
    }
    case 2:
      for (long k = 0; k < n; ++k) {
        const double t = 2 * std::numbers::pi * u(rng);
        c.push_back(std::cos(t) + 0.1 * g(rng));
        c.push_back(std::sin(t) + 0.1 * g(rng));
      }
      break;
    default: {
      // lattice subset: equal lengths and cocircular quadruples everywhere
      const long side = static_cast<long>(std::ceil(std::sqrt(2.0 * n)));
      std::vector<long> cells(side * side);
      for (long k = 0; k < side * side; ++k) cells[k] = k;
      std::shuffle(cells.begin(), cells.end(), rng);
      for (long k = 0; k < n; ++k) {
        c.push_back(static_cast<double>(cells[k] % side));
        c.push_back(static_cast<double>(cells[k] / side));
      }
    }
  }
  return PointCloud(2, std::move(c));
}

// Pair multisets with their birth and death simplices.
inline bool same_diagrams(const RipsDiagrams& a, const RipsDiagrams& b) {
  if (a.dgm0.size() != b.dgm0.size() || a.dgm1.size() != b.dgm1.size()) return false;
  for (std::size_t k = 0; k < a.dgm0.size(); ++k)
    if (!same_pair(a.dgm0[k], b.dgm0[k])) return false;
  using Key = std::tuple<std::vector<Index>, std::vector<Index>, double, double>;
  auto keys = [](const PersistenceDiagram& d) {
    std::vector<Key> out;
    for (const auto& p : d.pairs()) out.emplace_back(p.birth_simplex, p.death_simplex, p.birth, p.death);
    std::sort(out.begin(), out.end());
    return out;
  };
  return keys(a.dgm1) == keys(b.dgm1);
}

inline double fd_rel_error(const std::function<double(const PointCloud&)>& f, const PointCloud& z, const Matrix& g,
                           double h = 1e-5) {
  Matrix base = to_matrix(z), fd(base.rows(), base.cols());
  for (Eigen::Index i = 0; i < base.rows(); ++i)
    for (Eigen::Index k = 0; k < base.cols(); ++k) {
      Matrix p = base, m = base;
      p(i, k) += h;
      m(i, k) -= h;
      fd(i, k) = (f(to_cloud(p)) - f(to_cloud(m))) / (2 * h);
    }
  const double scale = std::max(fd.norm(), g.norm());
  return scale == 0 ? 0.0 : (fd - g).norm() / scale;
}

inline PointCloud random_cloud(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * dim);
  for (double& v : c) v = u(rng);
  return PointCloud(dim, std::move(c));
}

// Redraws until no two points are closer than min_gap, keeping central
// differences accurate.
inline PointCloud separated_cloud(std::size_t n, std::size_t dim, std::mt19937_64& rng, double min_gap = 0.01) {
  for (;;) {
    auto c = random_cloud(n, dim, rng);
    bool ok = true;
    for (Index i = 0; i < n && ok; ++i)
      for (Index j = i + 1; j < n && ok; ++j) ok = c.distance(i, j) >= min_gap;
    if (ok) return c;
  }
}

}  // namespace detail

/// Self-check of the engines against each other and of the main invariants.
/// Every check runs on seeded random inputs; a failing check reports the
/// first offending case.
inline std::vector<CheckResult> run_verify(const VerifyOptions& opt = {}) {
  using Clock = std::chrono::steady_clock;
  std::vector<CheckResult> out;
  auto run = [&](const std::string& name, auto&& body) {
    CheckResult r;
    r.name = name;
    const auto t0 = Clock::now();
    try {
      body(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  auto fail = [](CheckResult& r, const std::string& what) {
    if (r.passed) r.detail = what;
    r.passed = false;
  };

  run("planar engine = reduction (pairs, simplices, values)", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed);
    for (int i = 0; i < opt.clouds; ++i) {
      const long n = 4 + static_cast<long>(rng() % static_cast<std::uint64_t>(std::max<long>(1, opt.max_n - 3)));
      const auto c = detail::verify_cloud(i, n, rng);
      const auto pr = planar_rips_analysis(c, PlanarOptions{opt.threads});
      RipsOptions ro;
      ro.max_points = static_cast<std::size_t>(opt.max_n) + 1;
      const auto rr = rips_persistence(c, 1, ro);
      ++r.cases;
      if (!detail::same_diagrams(pr.diagrams, rr))
        fail(r, "cloud " + std::to_string(i) + " (n=" + std::to_string(n) + ")");
      // killing edge inside the length window of its polygon
      for (std::size_t p = 0; p < pr.killers.size(); ++p) {
        const Edge& k = pr.killers[p].edge;
        const Edge& dr = pr.graphs.polygons.polygons[p].longest_deleted;
        if (key_less(dr, k) || k.length < std::sqrt(3.0) / 2 * dr.length * (1 - 1e-12))
          fail(r, "window violated in cloud " + std::to_string(i));
      }
      // |RNG \ MST| = positive Dgm1 pairs
      std::size_t positive = 0;
      for (const auto& q : rr.dgm1.pairs()) positive += q.key_positive();
      if (pr.graphs.rng.size() - pr.graphs.mst.size() != positive)
        fail(r, "RNG\\MST count differs in cloud " + std::to_string(i));
    }
  });

  run("GCS^0 = MST", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 1);
    for (int i = 0; i < 20; ++i) {
      const auto c = detail::random_cloud(60, 2 + i % 3, rng);
      ++r.cases;
      if (!(skeleton_gcs(c, 0) == mst_highdim(c))) fail(r, "cloud " + std::to_string(i));
    }
  });

  run("loss gradients = finite differences", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 2);
    for (int s = 0; s < opt.gradient_configs; ++s) {
      const auto x = detail::separated_cloud(20, 3, rng), z = detail::separated_cloud(20, 2, rng);
      for (auto kind : {TopoLossKind::TopoAE0, TopoLossKind::TopoAE1, TopoLossKind::CascadeDistortion1}) {
        const TopologicalLoss loss(x, kind);
        const auto l = loss.evaluate(z);
        const EdgeSet ze = embedding_critical_edges(z, loss.embedding_dim());
        const double e = detail::fd_rel_error(
            [&](const PointCloud& c) { return edge_distortion(x, c, loss.input_edges(), ze); }, z, l.grad);
        ++r.cases;
        if (!(e < 1e-4)) fail(r, "loss " + std::to_string(static_cast<int>(kind)) + " config " + std::to_string(s));
      }
      const auto dx = rips_persistence(x, 1).dgm1, dz = planar_rips_persistence(z).dgm1;
      WassersteinOptions w;
      w.method = MatchingMethod::Exact;
      const auto m = wasserstein(dx, dz, w).matching;
      Matrix g = Matrix::Zero(20, 2);
      wasserstein_term(dx, dz, m, z, &g);
      const double e =
          detail::fd_rel_error([&](const PointCloud& c) { return wasserstein_term(dx, dz, m, c, nullptr); }, z, g);
      ++r.cases;
      if (!(e < 1e-4)) fail(r, "W1 term config " + std::to_string(s));
    }
  });

  run("auction = exact matching (1e-2 relative)", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < opt.diagram_pairs; ++s) {
      auto draw = [&] {
        std::vector<DiagramPoint> pts(rng() % 11);
        for (auto& p : pts) {
          p.birth = u(rng);
          p.death = p.birth + u(rng);
        }
        return PersistenceDiagram::from_points(1, pts);
      };
      const auto a = draw(), b = draw();
      WassersteinOptions ex;
      ex.method = MatchingMethod::Exact;
      const double exact = wasserstein(a, b, ex).distance, approx = wasserstein(a, b).distance;
      ++r.cases;
      if (std::abs(approx - exact) > 1e-2 * exact + 1e-12) fail(r, "pair " + std::to_string(s));
    }
  });

  run("TopoAE^0 bounds W2(Dgm0)^2", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 4);
    WassersteinOptions w;
    w.relative_tol = 1e-3;
    for (int s = 0; s < 20; ++s) {
      const auto x = detail::random_cloud(50, 3, rng), z = detail::random_cloud(50, 2, rng);
      const double wd = wasserstein(diagrams_of(x, 0).dgm0, diagrams_of(z, 0).dgm0, w).distance;
      ++r.cases;
      if (wd * wd > 1.01 * loss_topoae(x, z, 0).topological) fail(r, "pair " + std::to_string(s));
    }
  });

  run("counter-example diagrams and losses", [&](CheckResult& r) {
    const PointCloud x(3, {1, 0, 0, 0.5, 0.866, 0, -0.48, 0.667, 0, -0.73, -0.199, 0.433, -0.48, -1.065, 0, 0.5, -0.866, 0});
    const PointCloud z(2, {1, 0, 0.5, 0.866, -0.48, 0.667, -0.98, -0.199, -0.48, -1.065, 0.5, -0.866});
    const auto dx = diagrams_of(x, 1), dz = diagrams_of(z, 1);
    r.cases = 1;
    if (dx.dgm1.size() != 1 || std::abs(dx.dgm1[0].death - 1.732) > 1e-3) fail(r, "Dgm1(X)");
    if (dz.dgm1.size() != 1 || std::abs(dz.dgm1[0].death - 1.819) > 1e-3) fail(r, "Dgm1(Z)");
    if (!(loss_topoae(x, z, 1).topological <= 1e-9)) fail(r, "TopoAE^1 not zero");
    if (!(loss_cascade_distortion(x, z, 1).topological > 1e-3)) fail(r, "cascade distortion not positive");
  });
  return out;
}

}  // namespace topoae
