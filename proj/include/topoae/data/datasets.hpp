#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "topoae/core/errors.hpp"
#include "topoae/core/point_cloud.hpp"
#include "topoae/io/csv.hpp"

namespace topoae {

/// Synthetic cloud description. An unset n or noise selects the kind's
/// default. Kind-specific parameters go through `params` (csv: "path").
struct DatasetSpec {
  std::string kind = "twist";
  std::optional<long> n;
  std::optional<double> noise;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;
};

inline const std::vector<std::string>& dataset_kinds() {
  static const std::vector<std::string> k{"3clusters", "twist", "k4", "k5", "circle_noise", "grid", "uniform", "csv"};
  return k;
}

namespace detail {

using Vec3 = std::array<double, 3>;

// Points spread uniformly along the edges of a graph, plus isotropic noise.
inline PointCloud sample_graph(const std::vector<Vec3>& verts, long n, double noise, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < static_cast<int>(verts.size()); ++a)
    for (int b = a + 1; b < static_cast<int>(verts.size()); ++b) edges.push_back({a, b});
  std::vector<double> len;
  for (auto [a, b] : edges)
    len.push_back(std::hypot(verts[a][0] - verts[b][0], verts[a][1] - verts[b][1], verts[a][2] - verts[b][2]));
  std::discrete_distribution<int> pick(len.begin(), len.end());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, noise);
  std::vector<double> c;
  c.reserve(3 * n);
  for (long i = 0; i < n; ++i) {
    const auto [a, b] = edges[pick(rng)];
    const double t = u(rng);
    for (int k = 0; k < 3; ++k) c.push_back((1 - t) * verts[a][k] + t * verts[b][k] + g(rng));
  }
  return PointCloud(3, std::move(c));
}

}  // namespace detail

/// Seeded synthetic clouds. Sampler constants:
///   3clusters     n=800, 3D Gaussians of std 0.3 (noise) centered at
///                 (0,0,0), (6,0,0), (3,5,0)
///   twist         n=100, 3D ellipse with semi-axes 2 and 1, cross-section
///                 rotated by x radians along the major axis, stratified
///                 angles, noise 0.02
///   k4            n=300, edges of a regular tetrahedron of side 2, noise 0.02
///   k5            n=500, edges of K5 on a slightly perturbed triangular
///                 bipyramid, noise 0.02
///   circle_noise  n=500, 2D unit circle with Gaussian noise 0.1
///   grid          n=400, 2D unit lattice, row-major, noise 0
///   uniform       n=1000, 2D unit square
inline PointCloud generate(const DatasetSpec& spec) {
  const std::string& k = spec.kind;
  if (k == "csv") {
    const auto it = spec.params.find("path");
    if (it == spec.params.end()) throw ValidationError("csv dataset needs a path parameter");
    return io::read_csv(it->second);
  }
  const std::map<std::string, std::pair<long, double>> defaults{
      {"3clusters", {800, 0.3}}, {"twist", {100, 0.02}}, {"k4", {300, 0.02}},  {"k5", {500, 0.02}},
      {"circle_noise", {500, 0.1}}, {"grid", {400, 0.0}}, {"uniform", {1000, 0.0}}};
  const auto d = defaults.find(k);
  if (d == defaults.end()) throw ValidationError("unknown dataset kind '" + k + "'");
  const long n = spec.n.value_or(d->second.first);
  const double noise = spec.noise.value_or(d->second.second);
  if (n <= 0) throw ValidationError("dataset size must be positive");
  if (!(noise >= 0.0)) throw ValidationError("noise must be >= 0");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> c;
  const double pi = std::numbers::pi;

  if (k == "3clusters") {
    const double centers[3][3] = {{0, 0, 0}, {6, 0, 0}, {3, 5, 0}};
    for (long i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) c.push_back(centers[i % 3][j] + noise * g(rng));
    return PointCloud(3, std::move(c));
  }
  if (k == "twist") {
    for (long i = 0; i < n; ++i) {
      const double t = 2 * pi * (static_cast<double>(i) + u(rng)) / static_cast<double>(n);
      const double x = 2 * std::cos(t), r = std::sin(t), th = x;
      c.push_back(x + noise * g(rng));
      c.push_back(r * std::cos(th) + noise * g(rng));
      c.push_back(r * std::sin(th) + noise * g(rng));
    }
    return PointCloud(3, std::move(c));
  }
  if (k == "k4") {
    const double s = std::sqrt(2.0) / 2;  // side 2
    return detail::sample_graph({{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}}, n, noise, rng);
  }
  if (k == "k5") {
    return detail::sample_graph({{1.0, 0.05, 0.1}, {-0.5, 0.9, -0.05}, {-0.55, -0.85, 0.0}, {0.1, 0.05, 1.2}, {-0.05, 0.1, -1.25}},
                                n, noise, rng);
  }
  if (k == "circle_noise") {
    for (long i = 0; i < n; ++i) {
      const double t = 2 * pi * u(rng);
      c.push_back(std::cos(t) + noise * g(rng));
      c.push_back(std::sin(t) + noise * g(rng));
    }
    return PointCloud(2, std::move(c));
  }
  if (k == "grid") {
    const long side = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n))));
    for (long i = 0; i < n; ++i) {
      c.push_back(static_cast<double>(i % side) + (noise > 0 ? noise * g(rng) : 0.0));
      c.push_back(static_cast<double>(i / side) + (noise > 0 ? noise * g(rng) : 0.0));
    }
    return PointCloud(2, std::move(c));
  }
  // uniform
  for (long i = 0; i < 2 * n; ++i) c.push_back(u(rng));
  if (noise > 0)
    for (double& v : c) v += noise * g(rng);
  return PointCloud(2, std::move(c));
}

}  // namespace topoae
