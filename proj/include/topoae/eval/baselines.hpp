#pragma once

#include <Eigen/Dense>
#include <algorithm>

#include "topoae/core/errors.hpp"
#include "topoae/losses/losses.hpp"

namespace topoae {

/// Projection onto the top principal axes of the covariance.
inline PointCloud pca(const PointCloud& x, int dim = 2) {
  if (dim < 1 || static_cast<std::size_t>(dim) > x.dim()) throw ValidationError("pca: bad target dimension");
  if (x.empty()) throw ValidationError("pca of an empty cloud");
  const Matrix m = to_matrix(x);
  const Matrix c = m.rowwise() - m.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(m.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  // eigenvalues ascend; flip so the first output axis has the most variance
  const Eigen::MatrixXd axes = es.eigenvectors().rightCols(dim).rowwise().reverse();
  return to_cloud(c * axes);
}

/// Classical MDS: top eigenvectors of the double-centered squared distances,
/// scaled by the square roots of their eigenvalues (negatives clipped).
inline PointCloud classical_mds(const PointCloud& x, int dim = 2) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (dim < 1 || dim > n) throw ValidationError("mds: bad target dimension");
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double d = x.distance(i, j);
      b(i, j) = b(j, i) = d * d;
    }
  const Eigen::VectorXd row = b.rowwise().mean();
  const double all = row.mean();
  b = (-0.5) * ((b.colwise() - row).rowwise() - row.transpose()).array() - 0.5 * all;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  Matrix z(n, dim);
  for (int k = 0; k < dim; ++k) {
    const Eigen::Index col = n - 1 - k;
    const double s = std::sqrt(std::max(0.0, es.eigenvalues()(col)));
    z.col(k) = s * es.eigenvectors().col(col);
  }
  return to_cloud(z);
}

}  // namespace topoae
