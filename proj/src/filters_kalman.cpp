#include <cmath>

#include "enkf/errors.hpp"
#include "filters_detail.hpp"

namespace enkf {

namespace {

/// Symmetric square root of a PSD matrix; eigenvalues below `floor` are
/// treated as zero. With `inverse` set, returns the pseudo-inverse root.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a, bool inverse) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
  Eigen::VectorXd lam = eig.eigenvalues();
  const double floor = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) <= floor)
      lam(i) = 0.0;
    else
      lam(i) = inverse ? 1.0 / std::sqrt(lam(i)) : std::sqrt(lam(i));
  }
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

OracleReport kalman_oracle(const Ensemble& forecast, const Eigen::VectorXd& y,
                           const LinearObservation& h, const ObsError& r,
                           const TaperMatrices* loc) {
  detail::check_problem(forecast, y, h, r, loc);
  const EnsembleStats s = stats(forecast);
  const Eigen::MatrixXd pf = covariance(s);
  const Eigen::MatrixXd hd = h.to_dense();

  Eigen::MatrixXd pht = pf * hd.transpose();
  Eigen::MatrixXd hpht = hd * pht;
  if (loc) {
    pht.array() *= loc->c1.array();
    hpht.array() *= loc->c2.array();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(hpht + r.dense());
  if (llt.info() != Eigen::Success)
    throw LinearSolveError("innovation covariance is not positive definite");
  Eigen::MatrixXd gain = llt.solve(pht.transpose()).transpose();

  Eigen::VectorXd mean = s.mean - gain * (hd * s.mean - y);
  const auto n = forecast.dim();
  Eigen::MatrixXd pa = (Eigen::MatrixXd::Identity(n, n) - gain * hd) * pf;

  // Deviations realizing P_a: P_a^{1/2} P_f^{+1/2} X'_f stays in the forecast
  // deviation basis and keeps zero row sums.
  Eigen::MatrixXd dev = psd_sqrt(pa, false) * psd_sqrt(pf, true) * s.deviations;

  OracleReport out{detail::make_report(forecast, std::move(mean), std::move(dev)),
                   std::move(gain), std::move(pa)};
  return out;
}

AnalysisReport enkf_perturbed(const Ensemble& forecast, const Eigen::VectorXd& y,
                              const LinearObservation& h, const ObsError& r,
                              const TaperMatrices* loc, Rng& rng, bool recenter) {
  detail::check_problem(forecast, y, h, r, loc);
  const EnsembleStats s = stats(forecast);
  const Eigen::MatrixXd gain = detail::localized_gain(s, h, r, loc);
  const auto k = h.obs_dim();
  const auto m = forecast.size();

  std::normal_distribution<double> normal;
  Eigen::MatrixXd perturb(k, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd xi(k);
    for (Eigen::Index o = 0; o < k; ++o) xi(o) = normal(rng);
    perturb.col(i) = r.sqrt_apply(xi);
  }
  if (recenter) perturb = perturb.colwise() - perturb.rowwise().mean();

  Eigen::MatrixXd innov = h.apply(forecast.states());
  innov = (innov - perturb).colwise() - y;
  const Eigen::MatrixXd xa = forecast.states() - gain * innov;
  Eigen::VectorXd mean = xa.rowwise().mean();
  Eigen::MatrixXd dev = xa.colwise() - mean;
  return detail::make_report(forecast, std::move(mean), std::move(dev));
}

AnalysisReport esrf_sequential(const Ensemble& forecast, const Eigen::VectorXd& y,
                               const LinearObservation& h, const ObsError& r,
                               const TaperMatrices* loc) {
  detail::check_problem(forecast, y, h, r, loc);
  if (!r.is_diagonal())
    throw ValidationError("sequential square-root filter requires a diagonal R");
  EnsembleStats s = stats(forecast);
  const double denom = static_cast<double>(s.size() - 1);

  for (Eigen::Index o = 0; o < h.obs_dim(); ++o) {
    Eigen::RowVectorXd hdev;
    double hmean;
    if (h.is_selection()) {
      const auto idx = h.indices()[static_cast<std::size_t>(o)];
      hdev = s.deviations.row(idx);
      hmean = s.mean(idx);
    } else {
      const Eigen::RowVectorXd row = h.row(o);
      hdev = row * s.deviations;
      hmean = row.dot(s.mean);
    }
    Eigen::VectorXd pht = s.deviations * hdev.transpose() / denom;
    double hph = hdev.squaredNorm() / denom;
    if (loc) {
      pht.array() *= loc->c1.col(o).array();
      hph *= loc->c2(o, o);
    }
    const double var = r.variances()(o);
    const double total = hph + var;
    const Eigen::VectorXd gain = pht / total;
    const double alpha = 1.0 / (1.0 + std::sqrt(var / total));
    s.mean -= gain * (hmean - y(o));
    s.deviations -= alpha * gain * hdev;
  }
  return detail::make_report(forecast, std::move(s.mean), std::move(s.deviations));
}

AnalysisReport denkf(const Ensemble& forecast, const Eigen::VectorXd& y,
                     const LinearObservation& h, const ObsError& r, const TaperMatrices* loc) {
  detail::check_problem(forecast, y, h, r, loc);
  const EnsembleStats s = stats(forecast);
  const Eigen::MatrixXd gain = detail::localized_gain(s, h, r, loc);
  Eigen::VectorXd mean = s.mean - gain * (h.apply(s.mean) - y);
  Eigen::MatrixXd dev = s.deviations - 0.5 * gain * h.apply(s.deviations);
  return detail::make_report(forecast, std::move(mean), std::move(dev));
}

}  // namespace enkf
