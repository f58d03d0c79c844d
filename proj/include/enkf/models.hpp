#pragma once

#include <functional>

#include <Eigen/Dense>

namespace enkf {

/// Autonomous forecast dynamics dx/dt = f(x).
class Model {
 public:
  virtual ~Model() = default;
  virtual Eigen::Index dimension() const = 0;
  virtual Eigen::VectorXd rhs(const Eigen::VectorXd& x) const = 0;
};

/// Lorenz-96: dx_j/dt = (x_{j+1} - x_{j-2}) x_{j-1} - x_j + F on a ring.
class Lorenz96 final : public Model {
 public:
  explicit Lorenz96(Eigen::Index n = 40, double forcing = 8.0);

  Eigen::Index dimension() const override { return n_; }
  double forcing() const noexcept { return forcing_; }
  Eigen::VectorXd rhs(const Eigen::VectorXd& x) const override;

 private:
  Eigen::Index n_;
  double forcing_;
};

/// Wraps an arbitrary callable; handy for toy problems in tests.
class FunctionModel final : public Model {
 public:
  using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  FunctionModel(Eigen::Index n, Rhs f) : n_(n), f_(std::move(f)) {}

  Eigen::Index dimension() const override { return n_; }
  Eigen::VectorXd rhs(const Eigen::VectorXd& x) const override { return f_(x); }

 private:
  Eigen::Index n_;
  Rhs f_;
};

enum class Scheme { implicit_midpoint, rk4 };

struct IntegratorConfig {
  Scheme scheme = Scheme::implicit_midpoint;
  double dt = 0.005;
  double tol = 1e-12;  ///< fixed-point stopping threshold on the max-norm update
  int max_iters = 50;

  void validate() const;
};

/// One step of size cfg.dt. Implicit midpoint is solved by fixed-point
/// iteration from the explicit Euler predictor; throws IntegrationError if it
/// does not reach cfg.tol within cfg.max_iters.
Eigen::VectorXd step(const Model& model, const IntegratorConfig& cfg, const Eigen::VectorXd& x);

/// Number of steps covering `duration`; throws ValidationError unless the
/// duration is an integer multiple of cfg.dt (1e-9 relative).
long step_count(const IntegratorConfig& cfg, double duration);

Eigen::VectorXd propagate(const Model& model, const IntegratorConfig& cfg, Eigen::VectorXd x,
                          double duration);

/// Propagates each column independently.
Eigen::MatrixXd propagate_members(const Model& model, const IntegratorConfig& cfg,
                                  Eigen::MatrixXd members, double duration);

}  // namespace enkf
