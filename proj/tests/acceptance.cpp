// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "topoae/topoae.hpp"

using namespace topoae;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Lines go to stdout and to acceptance_report.txt in the working directory.
struct Report {
  int failed = 0;
  std::FILE* file = std::fopen("acceptance_report.txt", "w");
  ~Report() {
    if (file) std::fclose(file);
  }
  void line(int id, bool ok, const std::string& what) {
    for (std::FILE* out : {stdout, file}) {
      if (!out) continue;
      std::fprintf(out, "[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
      std::fflush(out);
    }
    if (!ok) ++failed;
  }
};

template <class... T>
std::string fmt(const char* f, T... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

std::string data_file(const std::string& name) { return std::string(TOPOAE_DATA_DIR) + "/" + name; }

PointCloud random_cloud(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * dim);
  for (double& v : c) v = u(rng);
  return PointCloud(dim, std::move(c));
}

// Uniform cloud with no two points closer than min_gap. Central differences
// with step h carry a relative truncation error of order (h / d)^2 on an
// edge of length d, so near-coincident points would test the oracle rather
// than the gradient.
PointCloud separated_cloud(std::size_t n, std::size_t dim, std::mt19937_64& rng, double min_gap = 0.01) {
  for (;;) {
    auto c = random_cloud(n, dim, rng);
    bool ok = true;
    for (Index i = 0; i < n && ok; ++i)
      for (Index j = i + 1; j < n && ok; ++j) ok = c.distance(i, j) >= min_gap;
    if (ok) return c;
  }
}

Matrix fd_gradient(const std::function<double(const PointCloud&)>& f, const PointCloud& z, double h = 1e-5) {
  Matrix base = to_matrix(z), g(base.rows(), base.cols());
  for (Eigen::Index i = 0; i < base.rows(); ++i)
    for (Eigen::Index k = 0; k < base.cols(); ++k) {
      Matrix p = base, m = base;
      p(i, k) += h;
      m(i, k) -= h;
      g(i, k) = (f(to_cloud(p)) - f(to_cloud(m))) / (2 * h);
    }
  return g;
}

double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0 ? 0.0 : (a - b).norm() / scale;
}

// Same multiset of pairs, same simplices, values within tol. Returns the
// largest value difference, or infinity on a structural mismatch.
double diagram_gap(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.size() != b.size()) return kInfinity;
  auto sorted = [](const PersistenceDiagram& d) {
    std::vector<PersistencePair> p = d.pairs();
    std::sort(p.begin(), p.end(), [](const PersistencePair& l, const PersistencePair& r) {
      return std::tie(l.birth_simplex, l.death_simplex) < std::tie(r.birth_simplex, r.death_simplex);
    });
    return p;
  };
  const auto pa = sorted(a), pb = sorted(b);
  double gap = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].birth_simplex != pb[i].birth_simplex || pa[i].death_simplex != pb[i].death_simplex) return kInfinity;
    if (pa[i].essential() != pb[i].essential()) return kInfinity;
    gap = std::max(gap, std::abs(pa[i].birth - pb[i].birth));
    if (!pa[i].essential()) gap = std::max(gap, std::abs(pa[i].death - pb[i].death));
  }
  return gap;
}

int crossings(const PointCloud& x, const PointCloud& z) {
  int total = 0;
  for (const auto& g : project_generators(x, z)) total += g.self_intersections;
  return total;
}

}  // namespace

int main() {
  Report rep;
  const auto x_ce = io::read_csv(data_file("counterexample/X.csv"));
  const auto z_ce = io::read_csv(data_file("counterexample/Z.csv"));

  // Criteria 1, 4 and 6 share the clouds.
  {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<long> size(4, 500);
    int mismatches = 0, window_bad = 0, count_bad = 0, tied_clouds = 0;
    double worst = 0.0;
    std::size_t polygons = 0;
    for (int i = 0; i < 2000; ++i) {
      const auto c = detail::verify_cloud(static_cast<std::size_t>(i), size(rng), rng);
      const auto pr = planar_rips_analysis(c);
      RipsOptions ro;
      ro.max_points = 501;
      const auto rr = rips_persistence(c, 1, ro);
      const double g = std::max(diagram_gap(pr.diagrams.dgm0, rr.dgm0), diagram_gap(pr.diagrams.dgm1, rr.dgm1));
      worst = std::max(worst, g);
      if (!(g <= 1e-9)) ++mismatches;
      for (std::size_t p = 0; p < pr.killers.size(); ++p) {
        const Edge& k = pr.killers[p].edge;
        const Edge& dr = pr.graphs.polygons.polygons[p].longest_deleted;
        ++polygons;
        if (key_less(dr, k) || k.length < std::sqrt(3.0) / 2 * dr.length) ++window_bad;
      }
      // positive in the tie-broken order; exact ties can give equal birth and death values
      std::size_t positive = 0, flat = 0;
      for (const auto& q : rr.dgm1.pairs()) {
        positive += q.key_positive();
        flat += q.key_positive() && q.persistence() == 0;
      }
      if (set_difference(pr.graphs.rng, pr.graphs.mst).size() != positive) ++count_bad;
      tied_clouds += flat > 0;
    }
    const double secs = since(t0);
    rep.line(1, mismatches == 0 && secs < 300,
             fmt("2000 planar clouds, %d mismatching, max value gap %.3g, %.1f s (limit 300 s)", mismatches, worst, secs));

    double discard = 1.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
      DatasetSpec spec;
      spec.kind = "uniform";
      spec.n = 5000;
      spec.seed = s;
      discard = std::min(discard, planar_rips_analysis(generate(spec)).window.fraction().value_or(0.0));
    }
    rep.line(4, window_bad == 0 && discard >= 0.5,
             fmt("%zu polygons, %d outside the window; min discard fraction on uniform n=5000: %.3f (>= 0.5)", polygons,
                 window_bad, discard));
    rep.line(6, count_bad == 0, fmt("|RNG\\MST| = #positive Dgm1 pairs failed on %d of 2000 clouds (%d clouds hold tied pairs with "
                 "birth = death, counted as positive)",
                 count_bad, tied_clouds));
  }

  // 2: counter-example regression
  {
    const auto dx = rips_persistence(x_ce, 1), dz = rips_persistence(z_ce, 1);
    auto one_pair = [](const PersistenceDiagram& d, double b, double e) {
      return d.size() == 1 && std::abs(d[0].birth - b) <= 1e-3 && std::abs(d[0].death - e) <= 1e-3;
    };
    auto dgm0_ok = [](const PersistenceDiagram& d) {
      int unit = 0, ess = 0;
      for (const auto& p : d.pairs()) {
        if (std::abs(p.birth) > 1e-3) return false;
        if (p.essential())
          ++ess;
        else if (std::abs(p.death - 1.0) <= 1e-3)
          ++unit;
        else
          return false;
      }
      return unit == 5 && ess == 1;
    };
    const double tae = loss_topoae(x_ce, z_ce, 1).topological;
    const double cd = loss_cascade_distortion(x_ce, z_ce, 1).topological;
    bool cascade_edge = false;
    const RipsFiltration f(z_ce);
    for (const auto& rec : cascades(f, positive_pairs(f, 1)))
      for (const Edge& e : rec.skeleton) cascade_edge = cascade_edge || std::abs(e.length - 1.623) <= 1e-3;
    const bool ok = one_pair(dx.dgm1, 1.0, 1.732) && one_pair(dz.dgm1, 1.0, 1.819) && dgm0_ok(dx.dgm0) &&
                    dgm0_ok(dz.dgm0) && tae <= 1e-9 && cd > 1e-3 && cascade_edge;
    rep.line(2, ok,
             fmt("Dgm1(X) death %.4f, Dgm1(Z) death %.4f, L_TAE1 %.3g, L_CD1 %.4g, cascade edge 1.623 %s",
                 dx.dgm1.empty() ? NAN : dx.dgm1[0].death, dz.dgm1.empty() ? NAN : dz.dgm1[0].death, tae, cd,
                 cascade_edge ? "found" : "missing"));
  }

  // 3: W2(Dgm0)^2 <= L_TAE0
  {
    std::mt19937_64 rng(3);
    WassersteinOptions w;
    w.relative_tol = 1e-3;
    int bad = 0;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      const auto x = random_cloud(50, 3, rng), z = random_cloud(50, 2, rng);
      const double wd = wasserstein(rips_persistence(x, 0).dgm0, rips_persistence(z, 0).dgm0, w).distance;
      const double l = loss_topoae(x, z, 0).topological;
      worst = std::max(worst, wd * wd / l);
      if (wd * wd > 1.01 * l) ++bad;
    }
    rep.line(3, bad == 0, fmt("100 pairs, %d violations, max W2^2 / L_TAE0 = %.4f", bad, worst));
  }

  // 5: GCS^0 = MST
  {
    std::mt19937_64 rng(5);
    int bad = 0;
    for (int s = 0; s < 100; ++s) {
      const auto c = random_cloud(20 + s, 2 + s % 3, rng);
      const RipsFiltration f(c);
      const EdgeSet mst = mst_highdim(c);
      EdgeSet deaths;  // edges killing a Dgm0 class in the reduction
      for (const auto& p : rips_persistence(f, 0).dgm0.pairs())
        if (!p.essential()) deaths.insert(p.death_edge);
      if (!(skeleton_gcs(f, 0) == mst) || !(skeleton_gcs(c, 0) == mst) || !(deaths == mst)) ++bad;
      if (c.dim() == 2 && !(neighborhood_graphs(c).mst == mst)) ++bad;
    }
    rep.line(5, bad == 0, fmt("100 clouds, %d with GCS^0 != MST", bad));
  }

  // 7: gradients against central differences, edge sets and matchings frozen
  {
    std::mt19937_64 rng(7);
    std::vector<double> worst(5, 0.0);
    for (int s = 0; s < 50; ++s) {
      const auto x = separated_cloud(25, 3, rng), z = separated_cloud(25, 2, rng), xt = random_cloud(25, 3, rng);
      Matrix g;
      loss_reconstruction(x, xt, &g);
      worst[0] = std::max(worst[0], rel_err(g, fd_gradient([&](const PointCloud& c) { return loss_reconstruction(x, c); }, xt)));
      const TopoLossKind kinds[] = {TopoLossKind::TopoAE0, TopoLossKind::TopoAE1, TopoLossKind::CascadeDistortion1};
      for (int k = 0; k < 3; ++k) {
        const TopologicalLoss loss(x, kinds[k]);
        const EdgeSet ze = embedding_critical_edges(z, loss.embedding_dim());
        const auto l = loss.evaluate(z);
        const auto fd = fd_gradient([&](const PointCloud& c) { return edge_distortion(x, c, loss.input_edges(), ze); }, z);
        worst[1 + k] = std::max(worst[1 + k], rel_err(l.grad, fd));
      }
      const auto dx = rips_persistence(x, 1).dgm1, dz = planar_rips_persistence(z).dgm1;
      WassersteinOptions w;
      w.method = MatchingMethod::Exact;
      const auto m = wasserstein(dx, dz, w).matching;
      Matrix gw = Matrix::Zero(25, 2);
      wasserstein_term(dx, dz, m, z, &gw);
      const auto fd = fd_gradient([&](const PointCloud& c) { return wasserstein_term(dx, dz, m, c, nullptr); }, z);
      worst[4] = std::max(worst[4], rel_err(gw, fd));
    }
    const bool ok = std::all_of(worst.begin(), worst.end(), [](double e) { return e < 1e-4; });
    rep.line(7, ok,
             fmt("max relative error over 50 configs: L_r %.2g, L_TAE0 %.2g, L_TAE1 %.2g, L_CD1 %.2g, W1 term %.2g",
                 worst[0], worst[1], worst[2], worst[3], worst[4]));
  }

  // 8: performance
  {
    BenchOptions bo;
    bo.sizes = {2000};
    bo.engines = {Engine::Planar, Engine::Reduction};
    bo.repeats = 1;
    const auto head = bench_scaling(bo);
    const double speedup = head[1].wall_ms / head[0].wall_ms;

    bo.sizes = {1000, 3000, 10000, 30000, 100000};
    bo.engines = {Engine::Planar};
    bo.repeats = 3;
    const auto rows = bench_scaling(bo);
    std::vector<double> n, ms;
    for (const auto& r : rows) {
      n.push_back(static_cast<double>(r.n));
      ms.push_back(r.wall_ms);
    }
    const double slope = loglog_slope(n, ms);
    const double big = rows.back().wall_ms / 1000.0;
    rep.line(8, speedup >= 10 && slope <= 1.3 && big < 10,
             fmt("n=2000 planar %.1f ms vs reduction %.0f ms (%.0fx, >= 10x); slope %.3f (<= 1.3); n=1e5 %.2f s (< 10 s)",
                 head[0].wall_ms, head[1].wall_ms, speedup, slope, big));
  }

  // 9: projection quality
  {
    const auto t0 = Clock::now();
    DatasetSpec spec;
    spec.kind = "twist";
    const auto x = generate(spec);
    TrainConfig tc;  // defaults: CD1, best of 10
    const auto r = train(x, AutoencoderConfig{}, tc);
    const double mw1 = mw_metric(x, r.best.z, 1);
    const int cross = crossings(x, r.best.z);
    const double pca_mw1 = mw_metric(x, pca(x), 1);
    const double secs = since(t0);

    // counter-example, free coordinates from the Z of the fixture
    TrainConfig fc;
    fc.restarts = 1;
    fc.stop_loss = 1e-9;
    const auto cd = embed_free(x_ce, fc, z_ce);
    const double cd_gap = mw_metric(x_ce, cd.best.z, 1);
    fc.loss = TopoLossKind::TopoAE1;
    const auto tae = embed_free(x_ce, fc, z_ce);
    const double tae_loss = tae.best.trace.back().topological, tae_gap = mw_metric(x_ce, tae.best.z, 1);
    const bool tae_ok = !(tae_loss <= 1e-6) || tae_gap > 5e-2;

    const bool ok = mw1 <= 5e-2 && cross == 0 && pca_mw1 >= 10 * mw1 && secs <= 600 && cd_gap <= 1e-2 && tae_ok;
    rep.line(9, ok,
             fmt("twist CD1 best of 10: MW1 %.4g (<= 5e-2), crossings %d, PCA MW1 %.4g (%.0fx), %.0f s; free mode: "
                 "CD1 gap %.3g (<= 1e-2), TopoAE1 loss %.2g gap %.3g (> 5e-2 when loss <= 1e-6)",
                 mw1, cross, pca_mw1, pca_mw1 / mw1, secs, cd_gap, tae_loss, tae_gap));
  }

  // 10: Wasserstein engine
  {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
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
      if (exact > 0) worst = std::max(worst, std::abs(approx - exact) / exact);
      else worst = std::max(worst, approx);
    }
    const double toy = loss_topoae(PointCloud(2, {-1, 0, 0, 0, 1, 0, 1, 1}), PointCloud(2, {-1, 0, 0, 0, 1, 0, 0, 1}), 0)
                           .topological;
    const double expect = 2 * (std::sqrt(2.0) - 1) * (std::sqrt(2.0) - 1);
    rep.line(10, worst <= 1e-2 && std::abs(toy - expect) <= 1e-9,
             fmt("auction vs exact max relative error %.3g (<= 1e-2); toy L_TAE0 %.12f vs %.12f", worst, toy, expect));
  }

  std::printf("%d criteria failed\n", rep.failed);
  return rep.failed == 0 ? 0 : 1;
}
