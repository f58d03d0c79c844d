#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "enkf/ensemble.hpp"
#include "enkf/localization.hpp"
#include "enkf/models.hpp"
#include "enkf/observation.hpp"

namespace enkf {

enum class FilterKind { enkf_perturbed, esrf_sequential, denkf, cenkf1, cenkf2, kalman_oracle };

std::string_view to_string(FilterKind kind);
/// Accepts the short CLI names (enkf, esrf, denkf, cenkf1, cenkf2, oracle)
/// and the long enum names.
FilterKind parse_filter(std::string_view name);

struct AnalysisConfig {
  FilterKind filter = FilterKind::cenkf1;
  double inflation = 1.0;  ///< applied by the cycling driver before analysis
  int steps = 4;           ///< pseudo-time Euler steps for cenkf1/cenkf2, ds = 1/steps
  std::optional<TaperMatrices> localization;
  bool recenter_perturbations = false;  ///< enkf_perturbed only

  void validate() const;
};

struct AnalysisReport {
  Ensemble analysis;
  /// Analysis mean and deviations exactly as the update produced them, before
  /// recombination into `analysis`.
  Eigen::VectorXd mean;
  Eigen::MatrixXd deviations;
  /// Potential after 0..L pseudo-time steps (cenkf variants only).
  std::vector<double> potential_trace;
  double increments_norm = 0.0;  ///< Frobenius norm of X_a - X_f
  std::vector<std::string> warnings;
};

struct OracleReport {
  AnalysisReport report;
  Eigen::MatrixXd gain;        ///< n x k, localized if tapers were given
  Eigen::MatrixXd covariance;  ///< (I - K H) P_f
};

/// Explicit Kalman update on the dense covariance. Small-n reference only.
OracleReport kalman_oracle(const Ensemble& forecast, const Eigen::VectorXd& y,
                           const LinearObservation& h, const ObsError& r,
                           const TaperMatrices* loc = nullptr);

/// Stochastic EnKF: every member is updated against its own perturbed copy
/// of the observations, y + R^{1/2} xi.
AnalysisReport enkf_perturbed(const Ensemble& forecast, const Eigen::VectorXd& y,
                              const LinearObservation& h, const ObsError& r,
                              const TaperMatrices* loc, Rng& rng, bool recenter = false);

/// Serial square-root filter, one scalar observation at a time. Requires a
/// diagonal R.
AnalysisReport esrf_sequential(const Ensemble& forecast, const Eigen::VectorXd& y,
                               const LinearObservation& h, const ObsError& r,
                               const TaperMatrices* loc = nullptr);

/// Deterministic EnKF: X'_a = X'_f - 1/2 K H X'_f with the localized gain.
AnalysisReport denkf(const Ensemble& forecast, const Eigen::VectorXd& y,
                     const LinearObservation& h, const ObsError& r,
                     const TaperMatrices* loc = nullptr);

/// Forward Euler over s in [0, 1] of the localized gradient flow
///   dx_i/ds = -1/2 (C1 o HP)^T R^{-1} (H x_i + H xbar - 2 y),
/// with HP re-evaluated from the current ensemble at every step.
AnalysisReport cenkf1(const Ensemble& forecast, const Eigen::VectorXd& y,
                      const LinearObservation& h, const ObsError& r, const TaperMatrices* loc,
                      int steps = 4);

/// Same flow with the coefficient matrix frozen at s = 0. The Euler
/// recursion runs on observation-space increments z_i = H x_i - y; states
/// are updated once from the accumulated increments.
AnalysisReport cenkf2(const Ensemble& forecast, const Eigen::VectorXd& y,
                      const LinearObservation& h, const ObsError& r, const TaperMatrices* loc,
                      int steps = 4);

/// Gradient flow for a nonlinear observation operator,
///   dx_i/ds = -1/2 (C o P) (grad S(x_i) + grad S(xbar)),
/// grad S(x) = J(x)^T R^{-1} (h(x) - y). Forms the dense n x n covariance, so
/// it is limited to n <= 1000. `state_taper` may be null.
AnalysisReport cenkf1_nonlinear(const Ensemble& forecast, const Eigen::VectorXd& y,
                                const NonlinearObservation& obs, const ObsError& r,
                                const Eigen::MatrixXd* state_taper, int steps = 4);

/// V(X) = m/2 { S(xbar) + 1/m sum_i S(x_i) }, S(x) = 1/2 (Hx - y)^T R^{-1} (Hx - y).
/// `members` is n x m with m >= 1.
double potential(const Eigen::MatrixXd& members, const Eigen::VectorXd& y,
                 const LinearObservation& h, const ObsError& r);
double potential(const Eigen::MatrixXd& members, const Eigen::VectorXd& y,
                 const NonlinearObservation& obs, const ObsError& r);

/// Runs the configured filter. Inflation is not applied here.
AnalysisReport analyze(const AnalysisConfig& cfg, const Ensemble& forecast,
                       const Eigen::VectorXd& y, const LinearObservation& h, const ObsError& r,
                       Rng& rng);

struct TimedObservation {
  double time = 0.0;
  Eigen::VectorXd y;
};

struct MollifiedTrajectory {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> members;
};

/// Continuous-in-time assimilation where each observation acts through a hat
/// mollifier delta_eps(t - t_j) = max(0, 1 - |t - t_j| / eps) / eps. Each time
/// step advances the dynamics with the configured integrator and adds the
/// forward-Euler forcing
///   -dt sum_j delta_eps(t - t_j) 1/2 (C1 o HP)^T R^{-1} (H x_i + H xbar - 2 y_j).
/// Requires eps > 0, dt <= eps / 2 and observation times at least 2 eps apart.
MollifiedTrajectory mollified_assimilate(const Model& model, const IntegratorConfig& cfg,
                                         const Ensemble& initial, double t0, double t_end,
                                         const std::vector<TimedObservation>& observations,
                                         const LinearObservation& h, const ObsError& r,
                                         const TaperMatrices* loc, double epsilon,
                                         int record_every = 1);

}  // namespace enkf
