#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "topoae/diagrams/metric.hpp"
#include "topoae/dr/adam.hpp"
#include "topoae/dr/autoencoder.hpp"
#include "topoae/losses/losses.hpp"
#include "topoae/util/parallel.hpp"

namespace topoae {

/// Raised when the loss or the embedding stops being finite. what() carries
/// a dump of the optimizer state at the failing iteration.
class TrainingDiverged : public InternalError {
 public:
  explicit TrainingDiverged(const std::string& what) : InternalError(what) {}
};

struct TrainConfig {
  int iterations = 1000;
  AdamConfig adam;
  double weight = 1e-2;  // topological weight w
  TopoLossKind loss = TopoLossKind::CascadeDistortion1;
  int restarts = 10;
  int mw_every = 0;       // trace MW0/MW1 every k iterations, 0 = final only
  double stop_loss = -1;  // free mode stops once L_t <= stop_loss
  bool standardize = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;   // restarts run in parallel
  DiagramEngineOptions engine;
  WassersteinOptions wasserstein;
};

struct TraceRow {
  int iter = 0;
  double reconstruction = 0.0;
  double topological = 0.0;
  double total = 0.0;
  double mw0 = std::numeric_limits<double>::quiet_NaN();
  double mw1 = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
  PointCloud z;
  std::optional<Autoencoder> model;  // empty in free-coordinate mode
  std::vector<TraceRow> trace;
  double mw1 = kInfinity;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

struct TrainResult {
  RunResult best;
  std::vector<double> restart_mw1;  // one entry per restart, in order
  int best_restart = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::uint64_t run_seed(std::uint64_t base, int restart, int attempt) {
  // splitmix64 over (base, restart, attempt)
  std::uint64_t x = base + 0x9e3779b97f4a7c15ULL * (1 + static_cast<std::uint64_t>(restart)) +
                    0xbf58476d1ce4e5b9ULL * static_cast<std::uint64_t>(attempt);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class DegenerateEmbedding : public std::runtime_error {
 public:
  DegenerateEmbedding() : std::runtime_error("all embedded points coincide") {}
};

inline bool all_coincide(const Matrix& z) {
  if (z.rows() < 2) return false;
  for (Eigen::Index i = 1; i < z.rows(); ++i)
    if (z.row(i) != z.row(0)) return false;
  return true;
}

// Beyond this magnitude squared distances overflow and the geometry breaks.
inline bool usable(const Matrix& z) { return z.allFinite() && (z.size() == 0 || z.cwiseAbs().maxCoeff() < 1e150); }

inline std::string state_dump(int iter, const LossBreakdown& l, const Matrix& z, const Matrix& g) {
  std::ostringstream os;
  os << "training diverged at iteration " << iter << ": L_r=" << l.reconstruction << " L_t=" << l.topological
     << " total=" << l.total << " |Z|max=" << (z.size() ? z.cwiseAbs().maxCoeff() : 0.0)
     << " |dZ|=" << g.norm() << " Z finite=" << z.allFinite();
  return os.str();
}

struct LayerSlots {
  AdamSlot<Matrix> w, b, gamma, beta;
};

inline void adam_apply(const Adam& opt, std::vector<Layer>& net, const std::vector<LayerGrad>& grad,
                       std::vector<LayerSlots>& slots) {
  slots.resize(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    opt.update(net[i].w, grad[i].w, slots[i].w);
    opt.update(net[i].b, grad[i].b, slots[i].b);
    if (net[i].norm) {
      opt.update(net[i].gamma, grad[i].gamma, slots[i].gamma);
      opt.update(net[i].beta, grad[i].beta, slots[i].beta);
    }
  }
}

inline void trace_metrics(TraceRow& row, const PersistenceDiagram& x0, const PersistenceDiagram& x1,
                          const PointCloud& z, const TrainConfig& tc) {
  const auto dz = diagrams_of(z, 1, tc.engine);
  row.mw0 = wasserstein(x0, dz.dgm0, tc.wasserstein).distance;
  row.mw1 = wasserstein(x1, dz.dgm1, tc.wasserstein).distance;
}

// Everything a run needs from X, computed once and shared by the restarts.
struct Setup {
  Matrix x;  // what the network sees
  PointCloud xc;
  Matrix shift, scale;
  std::optional<TopologicalLoss> loss;
  PersistenceDiagram dgm0{0}, dgm1{1};
};

// Column means and population standard deviations (1 for constant columns).
inline void column_moments(const Matrix& x, Matrix& shift, Matrix& scale) {
  shift = x.colwise().mean();
  scale = Matrix::Ones(1, x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double sd = std::sqrt((x.col(k).array() - shift(0, k)).square().mean());
    if (sd > 0.0) scale(0, k) = sd;
  }
}

inline Setup make_setup(const PointCloud& x, const TrainConfig& tc) {
  if (x.size() < 2) throw ValidationError("training needs at least two points");
  if (tc.iterations < 1) throw ValidationError("iterations must be >= 1");
  if (tc.restarts < 1) throw ValidationError("restarts must be >= 1");
  if (!(tc.weight >= 0.0)) throw ValidationError("topological weight must be >= 0");
  if (!(tc.adam.lr > 0.0)) throw ValidationError("learning rate must be positive");
  Setup s;
  s.x = to_matrix(x);
  s.shift = Matrix::Zero(1, s.x.cols());
  s.scale = Matrix::Ones(1, s.x.cols());
  if (tc.standardize) {
    column_moments(s.x, s.shift, s.scale);
    s.x = ((s.x.rowwise() - s.shift.row(0)).array().rowwise() / s.scale.row(0).array()).matrix();
  }
  s.xc = to_cloud(s.x);
  LossOptions lo;
  lo.engine = tc.engine;
  lo.wasserstein = tc.wasserstein;
  s.loss.emplace(s.xc, tc.loss, lo);
  const auto d = diagrams_of(s.xc, 1, tc.engine);
  s.dgm0 = d.dgm0;
  s.dgm1 = d.dgm1;
  return s;
}

inline double clock_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline RunResult train_run(const Setup& s, const AutoencoderConfig& ae, const TrainConfig& tc, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  AutoencoderConfig cfg = ae;
  cfg.seed = seed;
  Autoencoder net(static_cast<int>(s.x.cols()), cfg);
  net.set_standardization(s.shift, s.scale);
  Adam opt(tc.adam);
  std::vector<LayerSlots> enc_slots, dec_slots;
  std::vector<LayerGrad> enc_grad, dec_grad;
  RunResult out;
  out.seed = seed;
  Matrix z, xt, d_xt;
  for (int it = 0; it < tc.iterations; ++it) {
    net.forward(s.x, z, xt);
    if (all_coincide(z)) throw DegenerateEmbedding();
    LossBreakdown l;
    l.reconstruction = loss_reconstruction(s.x, xt, &d_xt);
    Matrix d_z = Matrix::Zero(z.rows(), z.cols());
    if (tc.weight > 0.0 && usable(z)) {
      const auto t = s.loss->evaluate(to_cloud(z));
      l.topological = t.topological;
      d_z = tc.weight * t.grad;
    }
    l.total = l.reconstruction + tc.weight * l.topological;
    if (!std::isfinite(l.total) || !usable(z)) throw TrainingDiverged(state_dump(it, l, z, d_z));
    TraceRow row{it, l.reconstruction, l.topological, l.total};
    if (tc.mw_every > 0 && it % tc.mw_every == 0) trace_metrics(row, s.dgm0, s.dgm1, to_cloud(z), tc);
    out.trace.push_back(row);
    net.backward(d_xt, d_z, enc_grad, dec_grad);
    opt.begin_step();
    adam_apply(opt, net.encoder(), enc_grad, enc_slots);
    adam_apply(opt, net.decoder(), dec_grad, dec_slots);
  }
  // Final pass fixes the inference statistics, so encode(X) returns Z.
  net.forward(s.x, z, xt, true);
  if (!usable(z)) throw TrainingDiverged("embedding is not finite after the last update");
  if (all_coincide(z)) throw DegenerateEmbedding();
  out.z = to_cloud(z);
  out.model = std::move(net);
  out.mw1 = wasserstein(s.dgm1, diagrams_of(out.z, 1, tc.engine).dgm1, tc.wasserstein).distance;
  if (!out.trace.empty()) {
    out.trace.back().mw1 = out.mw1;
    if (std::isnan(out.trace.back().mw0))
      out.trace.back().mw0 = wasserstein(s.dgm0, diagrams_of(out.z, 0, tc.engine).dgm0, tc.wasserstein).distance;
  }
  out.seconds = clock_seconds(t0);
  return out;
}

inline Matrix random_init(const Matrix& x, Eigen::Index dim, std::uint64_t seed) {
  // uniform in a box of the input's coordinate spread
  double spread = 0.0;
  for (Eigen::Index k = 0; k < x.cols(); ++k) spread = std::max(spread, x.col(k).maxCoeff() - x.col(k).minCoeff());
  if (spread == 0.0) spread = 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5 * spread, 0.5 * spread);
  Matrix z(x.rows(), dim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = u(rng);
  return z;
}

inline RunResult free_run(const Setup& s, const TrainConfig& tc, const Matrix& init, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Adam opt(tc.adam);
  AdamSlot<Matrix> slot;
  Matrix z = init;
  RunResult out;
  out.seed = seed;
  int last = tc.iterations;
  for (int it = 0; it < tc.iterations; ++it) {
    if (!usable(z)) throw TrainingDiverged(state_dump(it, LossBreakdown{}, z, Matrix()));
    if (all_coincide(z)) throw DegenerateEmbedding();
    const auto l = s.loss->evaluate(to_cloud(z));
    if (!std::isfinite(l.topological)) throw TrainingDiverged(state_dump(it, l, z, l.grad));
    if (l.topological <= tc.stop_loss) {
      last = it;
      break;
    }
    TraceRow row{it, 0.0, l.topological, l.topological};
    if (tc.mw_every > 0 && it % tc.mw_every == 0) trace_metrics(row, s.dgm0, s.dgm1, to_cloud(z), tc);
    out.trace.push_back(row);
    opt.begin_step();
    opt.update(z, l.grad, slot);
    if (!usable(z)) throw TrainingDiverged(state_dump(it, l, z, l.grad));
  }
  out.z = to_cloud(z);
  out.mw1 = wasserstein(s.dgm1, diagrams_of(out.z, 1, tc.engine).dgm1, tc.wasserstein).distance;
  out.trace.push_back({last, 0.0, s.loss->evaluate(out.z).topological, 0.0});
  out.trace.back().total = out.trace.back().topological;
  out.trace.back().mw1 = out.mw1;
  out.trace.back().mw0 = wasserstein(s.dgm0, diagrams_of(out.z, 0, tc.engine).dgm0, tc.wasserstein).distance;
  out.seconds = clock_seconds(t0);
  return out;
}

template <class Run>
TrainResult best_of(const TrainConfig& tc, Run&& run) {
  constexpr int kMaxReseeds = 5;
  TrainResult res;
  std::vector<std::optional<RunResult>> runs(tc.restarts);
  std::vector<std::vector<std::string>> warns(tc.restarts);
  parallel_for(0, static_cast<std::size_t>(tc.restarts), tc.threads, [&](std::size_t r) {
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t seed = run_seed(tc.seed, static_cast<int>(r), attempt);
      try {
        runs[r] = run(seed);
        return;
      } catch (const DegenerateEmbedding&) {
        warns[r].push_back("restart " + std::to_string(r) + ": degenerate embedding with seed " +
                           std::to_string(seed) + ", reseeding");
        if (attempt + 1 >= kMaxReseeds) throw InternalError("embedding stays degenerate after reseeding");
      }
    }
  });
  for (int r = 0; r < tc.restarts; ++r) {
    res.restart_mw1.push_back(runs[r]->mw1);
    res.warnings.insert(res.warnings.end(), warns[r].begin(), warns[r].end());
    if (r == 0 || runs[r]->mw1 < res.restart_mw1[res.best_restart]) res.best_restart = r;
  }
  res.best = std::move(*runs[res.best_restart]);
  return res;
}

}  // namespace detail

/// Trains the autoencoder `restarts` times with derived seeds and keeps the
/// run with the smallest MW^1(X, Z).
inline TrainResult train(const PointCloud& x, const AutoencoderConfig& ae, const TrainConfig& tc) {
  const auto s = detail::make_setup(x, tc);
  return detail::best_of(tc, [&](std::uint64_t seed) { return detail::train_run(s, ae, tc, seed); });
}

/// Adam directly on the embedding coordinates, minimizing the topological
/// term alone. With an initial embedding a single run is made; otherwise
/// each restart draws a random start.
inline TrainResult embed_free(const PointCloud& x, const TrainConfig& tc, const std::optional<PointCloud>& init = {},
                              int dim = 2) {
  auto s = detail::make_setup(x, tc);
  if (init) {
    if (init->size() != x.size()) throw ValidationError("embed_free: initial embedding has the wrong size");
    TrainConfig one = tc;
    one.restarts = 1;
    const Matrix z0 = to_matrix(*init);
    return detail::best_of(one, [&](std::uint64_t seed) { return detail::free_run(s, one, z0, seed); });
  }
  return detail::best_of(tc, [&](std::uint64_t seed) {
    return detail::free_run(s, tc, detail::random_init(s.x, dim, seed), seed);
  });
}

/// Zero-mean, unit-variance columns: the input the network sees with
/// TrainConfig::standardize.
inline PointCloud standardized(const PointCloud& x) {
  const Matrix m = to_matrix(x);
  Matrix shift, scale;
  detail::column_moments(m, shift, scale);
  return to_cloud(((m.rowwise() - shift.row(0)).array().rowwise() / scale.row(0).array()).matrix());
}

inline PointCloud encode(const Autoencoder& model, const PointCloud& points) { return model.encode(points); }

}  // namespace topoae
