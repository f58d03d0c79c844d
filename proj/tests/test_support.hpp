#pragma once

#include <algorithm>
#include <random>

#include <Eigen/Dense>

#include "enkf/observation.hpp"

namespace enkf::testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
  return a;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  return random_matrix(n, 1, rng, scale);
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

/// Residual of v after projecting onto range(basis), relative to |v|.
inline double range_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * (sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
  const Eigen::VectorXd resid = v - u * (u.transpose() * v);
  return resid.norm() / std::max(v.norm(), 1e-300);
}

/// Euler integration of the frozen-coefficient flow directly in state space:
///   x_i <- x_i - ds/2 B R^{-1} (H x_i + H xbar - 2 y),  B = C1 o (P0 H^T).
/// Independent of the observation-space increment bookkeeping.
inline Eigen::MatrixXd frozen_flow_state_euler(const Eigen::MatrixXd& x0,
                                               const Eigen::VectorXd& y,
                                               const Eigen::MatrixXd& h,
                                               const Eigen::MatrixXd& r,
                                               const Eigen::MatrixXd* c1, int steps) {
  const Eigen::Index m = x0.cols();
  const Eigen::VectorXd mean0 = x0.rowwise().mean();
  const Eigen::MatrixXd dev0 = x0.colwise() - mean0;
  const Eigen::MatrixXd p0 = dev0 * dev0.transpose() / static_cast<double>(m - 1);
  Eigen::MatrixXd b = p0 * h.transpose();
  if (c1) b = b.cwiseProduct(*c1);
  const Eigen::MatrixXd rinv = r.inverse();
  const double ds = 1.0 / steps;
  Eigen::MatrixXd x = x0;
  for (int l = 0; l < steps; ++l) {
    const Eigen::VectorXd mean = x.rowwise().mean();
    Eigen::MatrixXd rhs(x.rows(), m);
    for (Eigen::Index i = 0; i < m; ++i)
      rhs.col(i) = -0.5 * b * rinv * (h * x.col(i) + h * mean - 2.0 * y);
    x += ds * rhs;
  }
  return x;
}

}  // namespace enkf::testing
