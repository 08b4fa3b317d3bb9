#pragma once

#include "topoae/diagrams/wasserstein.hpp"
#include "topoae/ph/planar.hpp"
#include "topoae/ph/rips.hpp"

namespace topoae {

struct DiagramEngineOptions {
  std::size_t max_points = 3000;  // cap for the full reduction
  unsigned threads = 1;
};

/// The planar engine needs distinct points. A 2D cloud with coincident
/// points (a collapsing embedding) goes to the reduction when it fits.
inline bool use_planar_engine(const PointCloud& c, const DiagramEngineOptions& opt) {
  return c.dim() == 2 && (c.size() > opt.max_points || !c.has_duplicates());
}

/// Rips diagrams of a cloud: the planar engine for 2D clouds, the reduction
/// otherwise.
inline RipsDiagrams diagrams_of(const PointCloud& c, int max_dim, const DiagramEngineOptions& opt = {}) {
  if (max_dim < 0 || max_dim > 1) throw ValidationError("homology dimension must be 0 or 1");
  if (c.empty()) throw ValidationError("diagram of an empty cloud");
  if (max_dim == 1 && use_planar_engine(c, opt)) return planar_rips_persistence(c, PlanarOptions{opt.threads});
  RipsOptions ro;
  ro.max_points = opt.max_points;
  return rips_persistence(c, max_dim, ro);
}

/// MW^k(X, Z): Wasserstein distance between the k-th Rips diagrams.
inline double mw_metric(const PointCloud& x, const PointCloud& z, int k, const WassersteinOptions& wopt = {},
                        const DiagramEngineOptions& eopt = {}) {
  const auto dx = diagrams_of(x, k, eopt);
  const auto dz = diagrams_of(z, k, eopt);
  return wasserstein(dx[k], dz[k], wopt).distance;
}

}  // namespace topoae
