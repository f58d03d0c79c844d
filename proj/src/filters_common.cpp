#include <cmath>
#include <cstdio>
#include <string>

#include "enkf/errors.hpp"
#include "filters_detail.hpp"

namespace enkf {

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::enkf_perturbed:
      return "enkf";
    case FilterKind::esrf_sequential:
      return "esrf";
    case FilterKind::denkf:
      return "denkf";
    case FilterKind::cenkf1:
      return "cenkf1";
    case FilterKind::cenkf2:
      return "cenkf2";
    case FilterKind::kalman_oracle:
      return "oracle";
  }
  return "unknown";
}

FilterKind parse_filter(std::string_view name) {
  if (name == "enkf" || name == "enkf_perturbed") return FilterKind::enkf_perturbed;
  if (name == "esrf" || name == "esrf_sequential") return FilterKind::esrf_sequential;
  if (name == "denkf") return FilterKind::denkf;
  if (name == "cenkf1") return FilterKind::cenkf1;
  if (name == "cenkf2") return FilterKind::cenkf2;
  if (name == "oracle" || name == "kalman_oracle") return FilterKind::kalman_oracle;
  throw ValidationError("unknown filter '" + std::string(name) + "'");
}

void AnalysisConfig::validate() const {
  if (!(inflation >= 1.0)) throw ValidationError("inflation factor must be >= 1");
  if (steps < 1) throw ValidationError("pseudo-time step count must be >= 1");
}

AnalysisReport analyze(const AnalysisConfig& cfg, const Ensemble& forecast,
                       const Eigen::VectorXd& y, const LinearObservation& h, const ObsError& r,
                       Rng& rng) {
  cfg.validate();
  const TaperMatrices* loc = cfg.localization ? &*cfg.localization : nullptr;
  switch (cfg.filter) {
    case FilterKind::enkf_perturbed:
      return enkf_perturbed(forecast, y, h, r, loc, rng, cfg.recenter_perturbations);
    case FilterKind::esrf_sequential:
      return esrf_sequential(forecast, y, h, r, loc);
    case FilterKind::denkf:
      return denkf(forecast, y, h, r, loc);
    case FilterKind::cenkf1:
      return cenkf1(forecast, y, h, r, loc, cfg.steps);
    case FilterKind::cenkf2:
      return cenkf2(forecast, y, h, r, loc, cfg.steps);
    case FilterKind::kalman_oracle:
      return kalman_oracle(forecast, y, h, r, loc).report;
  }
  throw ValidationError("unhandled filter kind");
}

namespace detail {

void check_problem(const Ensemble& forecast, const Eigen::VectorXd& y, const LinearObservation& h,
                   const ObsError& r, const TaperMatrices* loc) {
  const auto n = forecast.dim();
  const auto k = h.obs_dim();
  if (h.state_dim() != n) throw DimensionError("observation operator does not match state size");
  if (y.size() != k) throw DimensionError("observation vector does not match operator");
  if (r.dim() != k) throw DimensionError("observation error does not match operator");
  if (!y.allFinite()) throw ValidationError("observation vector is non-finite");
  if (loc) {
    if (loc->c1.rows() != n || loc->c1.cols() != k)
      throw DimensionError("taper C1 must be n x k");
    if (loc->c2.rows() != k || loc->c2.cols() != k)
      throw DimensionError("taper C2 must be k x k");
  }
}

Eigen::MatrixXd localized_pht(const Eigen::MatrixXd& deviations, const Eigen::MatrixXd& hdev,
                              const TaperMatrices* loc) {
  const double denom = static_cast<double>(deviations.cols() - 1);
  Eigen::MatrixXd pht = deviations * hdev.transpose() / denom;
  if (loc) pht.array() *= loc->c1.array();
  return pht;
}

Eigen::MatrixXd localized_gain(const EnsembleStats& s, const LinearObservation& h,
                               const ObsError& r, const TaperMatrices* loc) {
  const double denom = static_cast<double>(s.size() - 1);
  const Eigen::MatrixXd hdev = h.apply(s.deviations);
  const Eigen::MatrixXd pht = localized_pht(s.deviations, hdev, loc);
  Eigen::MatrixXd innov = hdev * hdev.transpose() / denom;
  if (loc) innov.array() *= loc->c2.array();
  innov += r.dense();
  Eigen::LLT<Eigen::MatrixXd> llt(innov);
  if (llt.info() != Eigen::Success)
    throw LinearSolveError("innovation covariance is not positive definite");
  return llt.solve(pht.transpose()).transpose();
}

double potential_from_misfits(const Eigen::VectorXd& mean_misfit,
                              const Eigen::MatrixXd& misfit_deviations, const ObsError& r) {
  const double m = static_cast<double>(misfit_deviations.cols());
  const double s_mean = 0.5 * mean_misfit.dot(r.precision_apply(mean_misfit));
  const Eigen::MatrixXd z = misfit_deviations.colwise() + mean_misfit;
  const Eigen::MatrixXd rz = r.precision_apply(z);
  const double s_members = 0.5 * (z.array() * rz.array()).sum();
  return 0.5 * m * (s_mean + s_members / m);
}

AnalysisReport make_report(const Ensemble& forecast, Eigen::VectorXd mean,
                           Eigen::MatrixXd deviations) {
  Eigen::MatrixXd members = deviations.colwise() + mean;
  if (!members.allFinite()) throw DivergenceError("analysis produced non-finite states", -1);
  const double incr = (members - forecast.states()).norm();
  AnalysisReport rep{Ensemble(std::move(members)), std::move(mean), std::move(deviations), {},
                     incr, {}};
  return rep;
}

void monitor_potential(AnalysisReport& report) {
  const auto& v = report.potential_trace;
  for (std::size_t l = 1; l < v.size(); ++l) {
    if (v[l] > v[l - 1] * (1.0 + 1e-12)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "potential increased at step %zu: %.6g -> %.6g", l,
                    v[l - 1], v[l]);
      report.warnings.emplace_back(buf);
    }
  }
}

}  // namespace detail

double potential(const Eigen::MatrixXd& members, const Eigen::VectorXd& y,
                 const LinearObservation& h, const ObsError& r) {
  if (members.cols() < 1) throw DimensionError("potential needs at least one member");
  if (y.size() != h.obs_dim() || r.dim() != h.obs_dim())
    throw DimensionError("observation shapes do not match");
  const Eigen::VectorXd mean = members.rowwise().mean();
  const Eigen::VectorXd zbar = h.apply(mean) - y;
  const Eigen::MatrixXd zdev = h.apply(Eigen::MatrixXd(members.colwise() - mean));
  return detail::potential_from_misfits(zbar, zdev, r);
}

double potential(const Eigen::MatrixXd& members, const Eigen::VectorXd& y,
                 const NonlinearObservation& obs, const ObsError& r) {
  if (members.cols() < 1) throw DimensionError("potential needs at least one member");
  auto cost = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = obs.h(x) - y;
    return 0.5 * z.dot(r.precision_apply(z));
  };
  const double m = static_cast<double>(members.cols());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < members.cols(); ++i) sum += cost(members.col(i));
  return 0.5 * m * (cost(members.rowwise().mean()) + sum / m);
}

}  // namespace enkf
