#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "enkf/ensemble.hpp"

namespace enkf {

using Rng = std::mt19937_64;

/// Linear observation operator H: either a row selection of grid points or a
/// general dense k x n matrix.
class LinearObservation {
 public:
  /// Observe the listed grid indices of an n-dimensional state.
  static LinearObservation selection(std::vector<Eigen::Index> indices, Eigen::Index n);
  static LinearObservation dense(Eigen::MatrixXd h);

  /// Every `stride`-th component starting at `offset`; stride 2 / offset 0
  /// observes the 1-based odd components of a Lorenz-96 ring.
  static LinearObservation every_nth(Eigen::Index n, Eigen::Index stride, Eigen::Index offset = 0);

  bool is_selection() const noexcept { return !matrix_.has_value(); }
  Eigen::Index obs_dim() const noexcept { return obs_dim_; }
  Eigen::Index state_dim() const noexcept { return state_dim_; }
  /// Selected grid indices; empty for a dense operator.
  const std::vector<Eigen::Index>& indices() const noexcept { return indices_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Columnwise application to an n x m block.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::RowVectorXd row(Eigen::Index o) const;
  Eigen::MatrixXd to_dense() const;

 private:
  LinearObservation() = default;

  std::vector<Eigen::Index> indices_;
  std::optional<Eigen::MatrixXd> matrix_;
  Eigen::Index obs_dim_ = 0;
  Eigen::Index state_dim_ = 0;
};

Eigen::MatrixXd apply_ensemble(const LinearObservation& h, const Ensemble& ens);

/// Observation error covariance R, diagonal or full SPD.
class ObsError {
 public:
  static ObsError diagonal(Eigen::VectorXd variances);
  static ObsError identity(Eigen::Index k) { return diagonal(Eigen::VectorXd::Ones(k)); }
  /// Throws LinearSolveError if r is not symmetric positive definite.
  static ObsError full(Eigen::MatrixXd r);

  bool is_diagonal() const noexcept { return !chol_.has_value(); }
  Eigen::Index dim() const noexcept { return variances_.size(); }
  const Eigen::VectorXd& variances() const noexcept { return variances_; }
  Eigen::MatrixXd dense() const;

  /// R^{-1} v
  Eigen::VectorXd precision_apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd precision_apply(const Eigen::MatrixXd& v) const;
  /// R^{1/2} xi using the lower Cholesky factor.
  Eigen::VectorXd sqrt_apply(const Eigen::VectorXd& xi) const;

  /// Same error model with R scaled by `factor`.
  ObsError scaled(double factor) const;
  /// Error model restricted to the given observation order.
  ObsError permuted(const std::vector<Eigen::Index>& order) const;

 private:
  ObsError() = default;

  Eigen::VectorXd variances_;
  std::optional<Eigen::MatrixXd> full_;
  std::optional<Eigen::LLT<Eigen::MatrixXd>> chol_;
};

struct ObservationBatch {
  Eigen::VectorXd y;
  std::int64_t time_index = 0;
};

/// y = H truth + R^{1/2} xi, xi ~ N(0, I) drawn from `rng`.
ObservationBatch synthesize(const LinearObservation& h, const ObsError& r,
                            const Eigen::VectorXd& truth, Rng& rng, std::int64_t time_index = 0);

/// Caller-supplied nonlinear observation operator y = h(x) with its Jacobian.
struct NonlinearObservation {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> h;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

}  // namespace enkf
