#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "topoae/diagrams/metric.hpp"
#include "topoae/diagrams/wasserstein.hpp"
#include "topoae/ph/planar.hpp"
#include "topoae/ph/rips.hpp"

namespace topoae {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Matrix to_matrix(const PointCloud& c) {
  Matrix m(c.size(), c.dim());
  for (Index i = 0; i < c.size(); ++i)
    for (std::size_t k = 0; k < c.dim(); ++k) m(i, k) = c(i, k);
  return m;
}

inline PointCloud to_cloud(const Matrix& m) {
  return PointCloud(static_cast<std::size_t>(m.cols()), std::vector<double>(m.data(), m.data() + m.size()));
}

struct EdgeTerm {
  Edge edge;
  double high = 0.0;         // length in X
  double low = 0.0;          // length in Z
  double residual_sq = 0.0;
  bool input_side = true;    // from the X-side edge set
};

struct LossBreakdown {
  double total = 0.0;
  double reconstruction = 0.0;
  double topological = 0.0;
  std::vector<EdgeTerm> edges;
  Matrix grad;  // d total / d Z, one row per point
};

/// coef * d|z_i - z_j| / d z added into g. Coincident points contribute 0.
inline void add_length_gradient(const PointCloud& z, Index i, Index j, double coef, Matrix& g) {
  const double len = z.distance(i, j);
  if (len == 0.0) return;
  for (std::size_t k = 0; k < z.dim(); ++k) {
    const double d = coef * (z(i, k) - z(j, k)) / len;
    g(i, k) += d;
    g(j, k) -= d;
  }
}

/// Sum over the X-side edges of (d_X - d_Z)^2 plus over the Z-side edges of
/// (d_Z - d_X)^2, with its gradient in Z accumulated into out.
inline double edge_distortion(const PointCloud& x, const PointCloud& z, const EdgeSet& x_side, const EdgeSet& z_side,
                              LossBreakdown& out) {
  if (out.grad.rows() != static_cast<Eigen::Index>(z.size()) || out.grad.cols() != static_cast<Eigen::Index>(z.dim()))
    out.grad = Matrix::Zero(z.size(), z.dim());
  double sum = 0.0;
  auto term = [&](const Edge& e, bool input) {
    const double hx = x.distance(e.u, e.v), lz = z.distance(e.u, e.v);
    const double r = lz - hx;
    sum += r * r;
    add_length_gradient(z, e.u, e.v, 2.0 * r, out.grad);
    out.edges.push_back({e, hx, lz, r * r, input});
  };
  for (const Edge& e : x_side) term(e, true);
  for (const Edge& e : z_side) term(e, false);
  return sum;
}

inline double edge_distortion(const PointCloud& x, const PointCloud& z, const EdgeSet& x_side, const EdgeSet& z_side) {
  LossBreakdown tmp;
  return edge_distortion(x, z, x_side, z_side, tmp);
}

/// Mean over points of the squared reconstruction error, and its gradient
/// with respect to the reconstruction.
inline double loss_reconstruction(const Matrix& x, const Matrix& xt, Matrix* grad = nullptr) {
  if (x.rows() != xt.rows() || x.cols() != xt.cols()) throw ValidationError("reconstruction: shape mismatch");
  if (x.rows() == 0) return 0.0;
  const double n = static_cast<double>(x.rows());
  const Matrix diff = xt - x;
  if (grad) *grad = (2.0 / n) * diff;
  return diff.squaredNorm() / n;
}

inline double loss_reconstruction(const PointCloud& x, const PointCloud& xt, Matrix* grad = nullptr) {
  return loss_reconstruction(to_matrix(x), to_matrix(xt), grad);
}

/// Critical edges pi^d of an embedding, planar engine for 2D clouds.
inline EdgeSet embedding_critical_edges(const PointCloud& z, int d, const DiagramEngineOptions& opt = {}) {
  if (d == 0) return mst_highdim(z);
  if (use_planar_engine(z, opt)) return critical_edges_planar(z, PlanarOptions{opt.threads});
  return critical_edges(z, d, opt.max_points);
}

/// W_2 term between a fixed input diagram and the embedding's diagram, with
/// the matching frozen. Birth and death values of the embedding's points are
/// read off their anchor edges in z, so the gradient flows through them.
inline double wasserstein_term(const PersistenceDiagram& dx, const PersistenceDiagram& dz, const Matching& matching,
                               const PointCloud& z, Matrix* grad) {
  double cost = 0.0;
  struct Local {
    Index bu, bv, du, dv;
    double gb, gd;
  };
  std::vector<Local> parts;
  for (const auto& m : matching.couples) {
    if (m.b < 0) {
      const auto& p = dx[m.a];
      const double h = (p.death - p.birth);
      cost += 0.5 * h * h;
      continue;
    }
    const auto& q = dz[m.b];
    const double b = z.distance(q.birth_edge.u, q.birth_edge.v);
    const double d = z.distance(q.death_edge.u, q.death_edge.v);
    if (m.a >= 0) {
      const auto& p = dx[m.a];
      cost += (b - p.birth) * (b - p.birth) + (d - p.death) * (d - p.death);
      parts.push_back({q.birth_edge.u, q.birth_edge.v, q.death_edge.u, q.death_edge.v, 2.0 * (b - p.birth),
                       2.0 * (d - p.death)});
    } else {
      cost += 0.5 * (d - b) * (d - b);
      parts.push_back({q.birth_edge.u, q.birth_edge.v, q.death_edge.u, q.death_edge.v, -(d - b), d - b});
    }
  }
  const double w = std::sqrt(cost);
  if (grad) {
    if (grad->rows() != static_cast<Eigen::Index>(z.size())) *grad = Matrix::Zero(z.size(), z.dim());
    if (w > 0.0) {
      const double s = 0.5 / w;
      for (const auto& l : parts) {
        add_length_gradient(z, l.bu, l.bv, s * l.gb, *grad);
        add_length_gradient(z, l.du, l.dv, s * l.gd, *grad);
      }
    }
  }
  return w;
}

enum class TopoLossKind { TopoAE0, TopoAE1, CascadeDistortion0, CascadeDistortion1, TopoAEW1 };

struct LossOptions {
  DiagramEngineOptions engine;
  WassersteinOptions wasserstein;
};

/// Topological regularizer with its input-side data computed once from X.
class TopologicalLoss {
 public:
  TopologicalLoss(const PointCloud& x, TopoLossKind kind, const LossOptions& opt = {})
      : x_(x), kind_(kind), opt_(opt) {
    switch (kind) {
      case TopoLossKind::TopoAE0:
      case TopoLossKind::CascadeDistortion0:
      case TopoLossKind::TopoAEW1:
        x_edges_ = mst_highdim(x);
        break;
      case TopoLossKind::TopoAE1:
        x_edges_ = x.size() < 3 ? mst_highdim(x) : critical_edges(x, 1, opt.engine.max_points);
        break;
      case TopoLossKind::CascadeDistortion1:
        x_edges_ = x.size() < 3 ? mst_highdim(x) : skeleton_gcs(x, 1, opt.engine.max_points);
        break;
    }
    if (kind == TopoLossKind::TopoAEW1) x_dgm1_ = diagrams_of(x, 1, opt.engine).dgm1;
  }

  TopoLossKind kind() const { return kind_; }
  const PointCloud& input() const { return x_; }
  const EdgeSet& input_edges() const { return x_edges_; }
  int embedding_dim() const { return kind_ == TopoLossKind::TopoAE1 || kind_ == TopoLossKind::CascadeDistortion1 ? 1 : 0; }

  LossBreakdown evaluate(const PointCloud& z) const {
    if (z.size() != x_.size()) throw ValidationError("loss: X and Z have different sizes");
    LossBreakdown out;
    out.grad = Matrix::Zero(z.size(), z.dim());
    const EdgeSet z_edges = embedding_critical_edges(z, embedding_dim(), opt_.engine);
    out.topological = edge_distortion(x_, z, x_edges_, z_edges, out);
    if (kind_ == TopoLossKind::TopoAEW1) {
      const auto dz = diagrams_of(z, 1, opt_.engine).dgm1;
      const auto m = wasserstein(x_dgm1_, dz, opt_.wasserstein);
      Matrix g = Matrix::Zero(z.size(), z.dim());
      out.topological += wasserstein_term(x_dgm1_, dz, m.matching, z, &g);
      out.grad += g;
    }
    out.total = out.topological;
    return out;
  }

 private:
  PointCloud x_;
  TopoLossKind kind_;
  LossOptions opt_;
  EdgeSet x_edges_;
  PersistenceDiagram x_dgm1_{1};
};

inline LossBreakdown loss_topoae(const PointCloud& x, const PointCloud& z, int d, const LossOptions& opt = {}) {
  if (d != 0 && d != 1) throw ValidationError("loss: dimension must be 0 or 1");
  if (x.size() != z.size()) throw ValidationError("loss: X and Z have different sizes");
  return TopologicalLoss(x, d == 0 ? TopoLossKind::TopoAE0 : TopoLossKind::TopoAE1, opt).evaluate(z);
}

inline LossBreakdown loss_cascade_distortion(const PointCloud& x, const PointCloud& z, int d,
                                             const LossOptions& opt = {}) {
  if (d != 0 && d != 1) throw ValidationError("loss: dimension must be 0 or 1");
  if (x.size() != z.size()) throw ValidationError("loss: X and Z have different sizes");
  return TopologicalLoss(x, d == 0 ? TopoLossKind::CascadeDistortion0 : TopoLossKind::CascadeDistortion1, opt)
      .evaluate(z);
}

/// MW^1(X, Z) and its gradient in Z through the optimal matching.
inline LossBreakdown loss_wasserstein_term(const PointCloud& x, const PointCloud& z, const LossOptions& opt = {}) {
  if (x.size() != z.size()) throw ValidationError("loss: X and Z have different sizes");
  LossBreakdown out;
  out.grad = Matrix::Zero(z.size(), z.dim());
  const auto dx = diagrams_of(x, 1, opt.engine).dgm1;
  const auto dz = diagrams_of(z, 1, opt.engine).dgm1;
  const auto m = wasserstein(dx, dz, opt.wasserstein);
  out.topological = wasserstein_term(dx, dz, m.matching, z, &out.grad);
  out.total = out.topological;
  return out;
}

}  // namespace topoae
