#include "enkf/models.hpp"

#include <cmath>
#include <string>

#include "enkf/errors.hpp"

namespace enkf {

Lorenz96::Lorenz96(Eigen::Index n, double forcing) : n_(n), forcing_(forcing) {
  if (n < 4) throw ValidationError("Lorenz-96 needs n >= 4");
}

Eigen::VectorXd Lorenz96::rhs(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw DimensionError("Lorenz-96 state has wrong length");
  Eigen::VectorXd dx(n_);
  const Eigen::Index n = n_;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xp1 = x((j + 1) % n);
    const double xm1 = x((j + n - 1) % n);
    const double xm2 = x((j + n - 2) % n);
    dx(j) = (xp1 - xm2) * xm1 - x(j) + forcing_;
  }
  return dx;
}

void IntegratorConfig::validate() const {
  if (!(dt != 0.0) || !std::isfinite(dt)) throw ValidationError("integrator dt must be nonzero");
  if (!(tol > 0.0)) throw ValidationError("integrator tolerance must be positive");
  if (max_iters < 1) throw ValidationError("integrator max_iters must be >= 1");
}

namespace {

Eigen::VectorXd midpoint_step(const Model& model, const IntegratorConfig& cfg,
                              const Eigen::VectorXd& x) {
  Eigen::VectorXd next = x + cfg.dt * model.rhs(x);
  for (int it = 0; it < cfg.max_iters; ++it) {
    Eigen::VectorXd updated = x + cfg.dt * model.rhs(0.5 * (x + next));
    const double change = (updated - next).lpNorm<Eigen::Infinity>();
    next = std::move(updated);
    if (change < cfg.tol) return next;
    if (!std::isfinite(change)) break;
  }
  throw IntegrationError("implicit midpoint fixed-point iteration did not converge", next);
}

Eigen::VectorXd rk4_step(const Model& model, double dt, const Eigen::VectorXd& x) {
  const Eigen::VectorXd k1 = model.rhs(x);
  const Eigen::VectorXd k2 = model.rhs(x + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = model.rhs(x + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = model.rhs(x + dt * k3);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Eigen::VectorXd step(const Model& model, const IntegratorConfig& cfg, const Eigen::VectorXd& x) {
  if (x.size() != model.dimension()) throw DimensionError("state length does not match model");
  switch (cfg.scheme) {
    case Scheme::implicit_midpoint:
      return midpoint_step(model, cfg, x);
    case Scheme::rk4:
      return rk4_step(model, cfg.dt, x);
  }
  return x;
}

long step_count(const IntegratorConfig& cfg, double duration) {
  cfg.validate();
  if (duration == 0.0) return 0;
  const double ratio = duration / cfg.dt;
  const double steps = std::round(ratio);
  if (steps < 0.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, std::abs(ratio)))
    throw ValidationError("duration " + std::to_string(duration) +
                          " is not a non-negative integer multiple of dt " +
                          std::to_string(cfg.dt));
  return static_cast<long>(steps);
}

Eigen::VectorXd propagate(const Model& model, const IntegratorConfig& cfg, Eigen::VectorXd x,
                          double duration) {
  const long steps = step_count(cfg, duration);
  for (long s = 0; s < steps; ++s) x = step(model, cfg, x);
  return x;
}

Eigen::MatrixXd propagate_members(const Model& model, const IntegratorConfig& cfg,
                                  Eigen::MatrixXd members, double duration) {
  const long steps = step_count(cfg, duration);
  for (Eigen::Index i = 0; i < members.cols(); ++i) {
    Eigen::VectorXd x = members.col(i);
    for (long s = 0; s < steps; ++s) x = step(model, cfg, x);
    members.col(i) = x;
  }
  return members;
}

}  // namespace enkf
