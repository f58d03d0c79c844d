#include <string>

#include "enkf/errors.hpp"
#include "filters_detail.hpp"

namespace enkf {

namespace {

void check_steps(int steps) {
  if (steps < 1) throw ValidationError("pseudo-time step count must be >= 1");
}

void check_finite(const Eigen::VectorXd& mean, const Eigen::MatrixXd& dev, int step) {
  if (!mean.allFinite() || !dev.allFinite())
    throw DivergenceError("non-finite state after pseudo-time step " + std::to_string(step),
                          step);
}

}  // namespace

AnalysisReport cenkf1(const Ensemble& forecast, const Eigen::VectorXd& y,
                      const LinearObservation& h, const ObsError& r, const TaperMatrices* loc,
                      int steps) {
  detail::check_problem(forecast, y, h, r, loc);
  check_steps(steps);
  const double ds = 1.0 / steps;
  EnsembleStats s = stats(forecast);

  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(steps) + 1);
  Eigen::MatrixXd hdev = h.apply(s.deviations);
  Eigen::VectorXd misfit = h.apply(s.mean) - y;
  trace.push_back(detail::potential_from_misfits(misfit, hdev, r));

  for (int l = 0; l < steps; ++l) {
    const Eigen::MatrixXd pht = detail::localized_pht(s.deviations, hdev, loc);
    // Member form -1/2 PHt R^{-1} (H x_i + H xbar - 2y) split into its mean
    // and deviation parts.
    s.mean -= ds * pht * r.precision_apply(misfit);
    s.deviations -= (0.5 * ds) * pht * r.precision_apply(hdev);
    check_finite(s.mean, s.deviations, l + 1);

    hdev = h.apply(s.deviations);
    misfit = h.apply(s.mean) - y;
    trace.push_back(detail::potential_from_misfits(misfit, hdev, r));
  }

  AnalysisReport rep = detail::make_report(forecast, std::move(s.mean), std::move(s.deviations));
  rep.potential_trace = std::move(trace);
  detail::monitor_potential(rep);
  return rep;
}

AnalysisReport cenkf2(const Ensemble& forecast, const Eigen::VectorXd& y,
                      const LinearObservation& h, const ObsError& r, const TaperMatrices* loc,
                      int steps) {
  detail::check_problem(forecast, y, h, r, loc);
  check_steps(steps);
  const double ds = 1.0 / steps;
  const EnsembleStats s = stats(forecast);
  const double denom = static_cast<double>(s.size() - 1);

  // Coefficients frozen at s = 0.
  Eigen::MatrixXd zdev = h.apply(s.deviations);
  Eigen::VectorXd zbar = h.apply(s.mean) - y;
  const Eigen::MatrixXd pht = detail::localized_pht(s.deviations, zdev, loc);
  Eigen::MatrixXd hpht = zdev * zdev.transpose() / denom;
  if (loc) hpht.array() *= loc->c2.array();

  Eigen::VectorXd acc_bar = Eigen::VectorXd::Zero(zbar.size());
  Eigen::MatrixXd acc_dev = Eigen::MatrixXd::Zero(zdev.rows(), zdev.cols());
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(steps) + 1);
  trace.push_back(detail::potential_from_misfits(zbar, zdev, r));

  for (int l = 0; l < steps; ++l) {
    acc_bar += zbar;
    acc_dev += zdev;
    zbar -= ds * hpht * r.precision_apply(zbar);
    zdev -= (0.5 * ds) * hpht * r.precision_apply(zdev);
    check_finite(zbar, zdev, l + 1);
    trace.push_back(detail::potential_from_misfits(zbar, zdev, r));
  }

  Eigen::VectorXd mean = s.mean - ds * pht * r.precision_apply(acc_bar);
  Eigen::MatrixXd dev = s.deviations - (0.5 * ds) * pht * r.precision_apply(acc_dev);
  AnalysisReport rep = detail::make_report(forecast, std::move(mean), std::move(dev));
  rep.potential_trace = std::move(trace);
  detail::monitor_potential(rep);
  return rep;
}

AnalysisReport cenkf1_nonlinear(const Ensemble& forecast, const Eigen::VectorXd& y,
                                const NonlinearObservation& obs, const ObsError& r,
                                const Eigen::MatrixXd* state_taper, int steps) {
  check_steps(steps);
  const auto n = forecast.dim();
  if (n > 1000) throw ValidationError("dense nonlinear flow is limited to n <= 1000");
  if (!obs.h || !obs.jacobian) throw ValidationError("nonlinear observation needs h and jacobian");
  if (state_taper && (state_taper->rows() != n || state_taper->cols() != n))
    throw DimensionError("state taper must be n x n");
  if (r.dim() != y.size()) throw DimensionError("observation error does not match y");

  const double ds = 1.0 / steps;
  auto grad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd z = obs.h(x) - y;
    if (z.size() != y.size()) throw DimensionError("h(x) has wrong length");
    return obs.jacobian(x).transpose() * r.precision_apply(z);
  };

  Eigen::MatrixXd x = forecast.states();
  std::vector<double> trace;
  trace.push_back(potential(x, y, obs, r));
  for (int l = 0; l < steps; ++l) {
    const EnsembleStats s = stats(Ensemble(x));
    Eigen::MatrixXd p = covariance(s);
    if (state_taper) p.array() *= state_taper->array();
    const Eigen::VectorXd gbar = grad(s.mean);
    Eigen::MatrixXd g(n, x.cols());
    for (Eigen::Index i = 0; i < x.cols(); ++i) g.col(i) = grad(x.col(i)) + gbar;
    x -= (0.5 * ds) * p * g;
    if (!x.allFinite())
      throw DivergenceError("non-finite state after pseudo-time step " + std::to_string(l + 1),
                            l + 1);
    trace.push_back(potential(x, y, obs, r));
  }
  Eigen::VectorXd mean = x.rowwise().mean();
  Eigen::MatrixXd dev = x.colwise() - mean;
  AnalysisReport rep = detail::make_report(forecast, std::move(mean), std::move(dev));
  rep.potential_trace = std::move(trace);
  detail::monitor_potential(rep);
  return rep;
}

}  // namespace enkf
