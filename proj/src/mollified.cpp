#include <algorithm>
#include <cmath>

#include "enkf/errors.hpp"
#include "filters_detail.hpp"

namespace enkf {

namespace {

double hat_mollifier(double s, double eps) {
  return std::max(0.0, 1.0 - std::abs(s) / eps) / eps;
}

}  // namespace

MollifiedTrajectory mollified_assimilate(const Model& model, const IntegratorConfig& cfg,
                                         const Ensemble& initial, double t0, double t_end,
                                         const std::vector<TimedObservation>& observations,
                                         const LinearObservation& h, const ObsError& r,
                                         const TaperMatrices* loc, double epsilon,
                                         int record_every) {
  cfg.validate();
  if (!(epsilon > 0.0)) throw ValidationError("mollifier width must be positive");
  if (cfg.dt > 0.5 * epsilon * (1.0 + 1e-12))
    throw ValidationError("integration step must satisfy dt <= eps / 2");
  if (record_every < 1) throw ValidationError("record_every must be >= 1");
  if (initial.dim() != model.dimension()) throw DimensionError("ensemble does not match model");

  std::vector<TimedObservation> obs = observations;
  std::stable_sort(obs.begin(), obs.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });
  for (std::size_t j = 0; j < obs.size(); ++j) {
    detail::check_problem(initial, obs[j].y, h, r, loc);
    if (j > 0 && obs[j].time - obs[j - 1].time < 2.0 * epsilon)
      throw ValidationError("mollifier windows of consecutive observations overlap");
  }

  const long steps = step_count(cfg, t_end - t0);
  const double dt = cfg.dt;
  Eigen::MatrixXd x = initial.states();
  MollifiedTrajectory traj;
  traj.times.push_back(t0);
  traj.members.push_back(x);

  for (long nstep = 0; nstep < steps; ++nstep) {
    const double t = t0 + static_cast<double>(nstep) * dt;
    Eigen::MatrixXd forcing = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (const auto& ob : obs) {
      const double w = hat_mollifier(t - ob.time, epsilon);
      if (w == 0.0) continue;
      const Eigen::VectorXd mean = x.rowwise().mean();
      const Eigen::MatrixXd dev = x.colwise() - mean;
      const Eigen::MatrixXd hdev = h.apply(dev);
      const Eigen::MatrixXd pht = detail::localized_pht(dev, hdev, loc);
      const Eigen::VectorXd misfit = h.apply(mean) - ob.y;
      const Eigen::MatrixXd innov = (hdev.colwise() + 2.0 * misfit);
      forcing += w * 0.5 * pht * r.precision_apply(innov);
    }
    x = propagate_members(model, cfg, std::move(x), dt) - dt * forcing;
    if (!x.allFinite())
      throw DivergenceError("non-finite state in mollified assimilation",
                            static_cast<int>(nstep + 1));
    if ((nstep + 1) % record_every == 0 || nstep + 1 == steps) {
      traj.times.push_back(t0 + static_cast<double>(nstep + 1) * dt);
      traj.members.push_back(x);
    }
  }
  return traj;
}

}  // namespace enkf
