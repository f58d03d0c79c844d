#include "enkf/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "enkf/ensemble.hpp"
#include "enkf/filters.hpp"
#include "enkf/localization.hpp"
#include "enkf/models.hpp"
#include "enkf/observation.hpp"

namespace enkf {

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
  return a;
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

SelfTestResult check(const char* name, double value, double bound) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3e (bound %.1e)", value, bound);
  return {name, value <= bound, buf};
}

}  // namespace

std::vector<SelfTestResult> run_selftest(unsigned seed) {
  Rng rng(seed);
  std::vector<SelfTestResult> out;

  const Ensemble ens(random_matrix(6, 8, rng));
  const EnsembleStats s = stats(ens);
  out.push_back(check("deviation row sums vanish",
                      s.deviations.rowwise().sum().cwiseAbs().maxCoeff(),
                      1e-10 * ens.states().cwiseAbs().maxCoeff()));

  const LinearObservation h = LinearObservation::every_nth(6, 2);
  const ObsError r = ObsError::identity(h.obs_dim());
  const Eigen::VectorXd y = random_matrix(h.obs_dim(), 1, rng);
  const TaperMatrices tapers =
      build_tapers(RingMetric{6}, TaperFunction::gaspari_cohn(2.0), h.indices(), 6);

  const OracleReport oracle = kalman_oracle(ens, y, h, r);
  const AnalysisReport flow = cenkf1(ens, y, h, r, nullptr, 4096);
  out.push_back(check("cenkf1 endpoint matches Kalman covariance",
                      rel(covariance(stats(flow.analysis)), oracle.covariance), 1e-2));
  out.push_back(check("cenkf1 endpoint matches Kalman mean",
                      rel(flow.mean, oracle.report.mean), 1e-2));

  const AnalysisReport one = cenkf1(ens, y, h, r, &tapers, 1);
  const AnalysisReport two = cenkf2(ens, y, h, r, &tapers, 1);
  out.push_back(check("cenkf1 and cenkf2 coincide for one step",
                      rel(one.analysis.states(), two.analysis.states()), 1e-12));

  const AnalysisReport esrf = esrf_sequential(ens, y, h, r);
  out.push_back(check("serial square-root filter matches Kalman covariance",
                      rel(covariance(stats(esrf.analysis)), oracle.covariance), 1e-10));

  out.push_back(check("Gaspari-Cohn continuity at z = 1",
                      std::abs(gaspari_cohn(1.0) - gaspari_cohn(std::nextafter(1.0, 2.0))),
                      1e-12));

  const Lorenz96 model(40);
  IntegratorConfig fwd;
  IntegratorConfig back = fwd;
  back.dt = -fwd.dt;
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(40, 8.0) + random_matrix(40, 1, rng);
  const Eigen::VectorXd x1 = step(model, back, step(model, fwd, x0));
  out.push_back(check("implicit midpoint is time symmetric",
                      (x1 - x0).lpNorm<Eigen::Infinity>(), 10 * fwd.tol + 1e-12));
  return out;
}

}  // namespace enkf
