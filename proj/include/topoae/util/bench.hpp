#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "topoae/data/datasets.hpp"
#include "topoae/ph/planar.hpp"
#include "topoae/ph/rips.hpp"

namespace topoae {

enum class Engine { Planar, Reduction };

inline const char* engine_name(Engine e) { return e == Engine::Planar ? "planar" : "reduction"; }

struct BenchRow {
  long n = 0;
  Engine engine = Engine::Planar;
  unsigned threads = 1;
  double wall_ms = 0;     // medians over the repeats
  double build_ms = 0;    // planar stages, 0 for the reduction
  double mml_ms = 0;
  double pairing_ms = 0;
  double discard_fraction = std::numeric_limits<double>::quiet_NaN();
  std::size_t pairs = 0;  // finite Dgm1 points
};

struct BenchOptions {
  std::string kind = "uniform";
  std::vector<long> sizes{1000, 3000, 10000};
  std::vector<Engine> engines{Engine::Planar};
  std::vector<unsigned> threads{1};
  int repeats = 3;
  std::uint64_t seed = 0;
  std::size_t max_points = 3000;  // reduction cap
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Wall time of the Dgm0/Dgm1 computation per (n, engine, threads), with the
/// planar stage breakdown. Each row is the median of `repeats` runs on the
/// same seeded cloud.
inline std::vector<BenchRow> bench_scaling(const BenchOptions& opt) {
  if (opt.repeats < 1) throw ValidationError("bench: repeats must be >= 1");
  std::vector<BenchRow> rows;
  using Clock = std::chrono::steady_clock;
  for (long n : opt.sizes) {
    DatasetSpec spec;
    spec.kind = opt.kind;
    spec.n = n;
    spec.seed = opt.seed;
    const PointCloud c = generate(spec);
    for (Engine e : opt.engines) {
      for (unsigned t : opt.threads) {
        if (e == Engine::Reduction && t != opt.threads.front()) continue;  // sequential engine
        std::vector<double> wall, build, mml, pairing;
        BenchRow row;
        row.n = n;
        row.engine = e;
        row.threads = t;
        for (int r = 0; r < opt.repeats; ++r) {
          const auto t0 = Clock::now();
          if (e == Engine::Planar) {
            const auto res = planar_rips_analysis(c, PlanarOptions{t});
            build.push_back(res.timings.build_ms);
            mml.push_back(res.timings.mml_ms);
            pairing.push_back(res.timings.pairing_ms);
            row.discard_fraction = res.window.fraction().value_or(std::numeric_limits<double>::quiet_NaN());
            row.pairs = res.diagrams.dgm1.size();
          } else {
            RipsOptions ro;
            ro.max_points = opt.max_points;
            row.pairs = rips_persistence(c, 1, ro).dgm1.size();
          }
          wall.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        }
        row.wall_ms = median(wall);
        row.build_ms = median(build);
        row.mml_ms = median(mml);
        row.pairing_ms = median(pairing);
        if (e == Engine::Reduction) row.build_ms = row.mml_ms = row.pairing_ms = 0;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope fit needs at least two matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace topoae
