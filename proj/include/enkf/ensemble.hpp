#pragma once

#include <Eigen/Dense>

namespace enkf {

class LinearObservation;

/// An n x m ensemble: each column is one member state.
///
/// Construction validates the shape (m >= 2, n >= 1) and that every entry is
/// finite. Values are immutable afterwards.
class Ensemble {
 public:
  explicit Ensemble(Eigen::MatrixXd states);

  const Eigen::MatrixXd& states() const noexcept { return states_; }
  Eigen::Index dim() const noexcept { return states_.rows(); }
  Eigen::Index size() const noexcept { return states_.cols(); }
  auto member(Eigen::Index i) const { return states_.col(i); }

 private:
  Eigen::MatrixXd states_;
};

/// Mean and deviation matrix X' = X - mean * e^T.
struct EnsembleStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd deviations;

  Eigen::Index size() const noexcept { return deviations.cols(); }
  /// Recombines mean * e^T + X'.
  Eigen::MatrixXd members() const;
};

/// Observation-space covariance products built from H X'.
struct CrossProducts {
  Eigen::MatrixXd hp;    ///< k x n, H P
  Eigen::MatrixXd hpht;  ///< k x k, H P H^T
};

EnsembleStats stats(const Ensemble& ens);

/// Dense sample covariance X'(X')^T / (m - 1). Only meant for small n.
Eigen::MatrixXd covariance(const EnsembleStats& s);

/// H P and H P H^T formed from the k x m product H X', never from P.
CrossProducts cross_products(const EnsembleStats& s, const LinearObservation& h);

/// Multiplicative inflation: mean * e^T + delta * X'. Requires delta >= 1.
Ensemble inflate(const Ensemble& ens, double delta);

}  // namespace enkf
