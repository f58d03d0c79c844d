#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "enkf/errors.hpp"
#include "enkf/models.hpp"
#include "test_support.hpp"

using namespace enkf;
using enkf::testing::random_vector;

TEST_CASE("Lorenz-96 right-hand side") {
  const Lorenz96 l96(40);
  CHECK(l96.rhs(Eigen::VectorXd::Zero(40)) == Eigen::VectorXd::Constant(40, 8.0));
  CHECK(l96.rhs(Eigen::VectorXd::Constant(40, 3.5)).isApprox(Eigen::VectorXd::Constant(40, 4.5)));

  const Lorenz96 small(5);
  Eigen::VectorXd x(5);
  x << 1, 2, 3, 4, 5;
  CHECK(small.rhs(x)(0) == -3.0);
  CHECK_THROWS_AS(Lorenz96(3), ValidationError);
}

TEST_CASE("property: rhs commutes with cyclic rotation") {
  Rng rng(8);
  const Lorenz96 l96(40);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = random_vector(40, rng, 4.0);
    Eigen::VectorXd rotated(40);
    for (int j = 0; j < 40; ++j) rotated((j + 1) % 40) = x(j);
    const Eigen::VectorXd f = l96.rhs(x);
    const Eigen::VectorXd g = l96.rhs(rotated);
    for (int j = 0; j < 40; ++j) CHECK(g((j + 1) % 40) == f(j));
  }
}

TEST_CASE("step") {
  const Lorenz96 l96(40);
  Rng rng(4);
  const Eigen::VectorXd x = random_vector(40, rng, 3.0);

  SUBCASE("vanishing step") {
    IntegratorConfig cfg;
    cfg.dt = 1e-12;
    CHECK((step(l96, cfg, x) - x).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("first step from rest") {
    const Eigen::VectorXd next = step(l96, IntegratorConfig{}, Eigen::VectorXd::Zero(40));
    CHECK((next.array() - 0.04).abs().maxCoeff() <= 1e-3);
  }
  SUBCASE("implicit midpoint and rk4 agree over a short window") {
    IntegratorConfig mid;
    IntegratorConfig rk = mid;
    rk.scheme = Scheme::rk4;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::VectorXd unit(40);
    for (auto& v : unit) v = uniform(rng);
    const Eigen::VectorXd a = propagate(l96, mid, unit, 0.05);
    const Eigen::VectorXd b = propagate(l96, rk, unit, 0.05);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-5);
  }
  SUBCASE("midpoint error is second order at attractor amplitudes") {
    Eigen::VectorXd start = Eigen::VectorXd::Constant(40, 8.0);
    start(0) += 0.01;
    start = propagate(l96, IntegratorConfig{}, start, 10.0);
    IntegratorConfig rk;
    rk.scheme = Scheme::rk4;
    rk.dt = 0.0005;
    const Eigen::VectorXd ref = propagate(l96, rk, start, 0.05);
    std::vector<double> errs;
    for (double dt : {0.01, 0.005, 0.0025}) {
      IntegratorConfig mid;
      mid.dt = dt;
      errs.push_back((propagate(l96, mid, start, 0.05) - ref).cwiseAbs().maxCoeff());
    }
    CHECK(errs[1] / errs[0] == doctest::Approx(0.25).epsilon(0.15));
    CHECK(errs[2] / errs[1] == doctest::Approx(0.25).epsilon(0.15));
  }
  SUBCASE("non-convergence reports the iterate") {
    IntegratorConfig cfg;
    cfg.max_iters = 1;
    try {
      step(l96, cfg, x);
      FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
      CHECK(e.iterate().size() == 40);
    }
  }
}

TEST_CASE("property: implicit midpoint is time symmetric") {
  const Lorenz96 l96(40);
  Rng rng(12);
  IntegratorConfig fwd;
  IntegratorConfig back = fwd;
  back.dt = -fwd.dt;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(40, 2.0) + random_vector(40, rng, 3.0);
    const Eigen::VectorXd there_and_back = step(l96, back, step(l96, fwd, x));
    CHECK((there_and_back - x).cwiseAbs().maxCoeff() <= 10 * fwd.tol);
  }
}

TEST_CASE("propagate") {
  const Lorenz96 l96(40);
  Rng rng(6);
  const Eigen::VectorXd x = random_vector(40, rng, 2.0);
  const IntegratorConfig cfg;
  CHECK(propagate(l96, cfg, x, 0.0) == x);
  CHECK(propagate(l96, cfg, x, 2 * cfg.dt) == step(l96, cfg, step(l96, cfg, x)));

  Eigen::VectorXd loop = x;
  for (int s = 0; s < 10; ++s) loop = step(l96, cfg, loop);
  CHECK(propagate(l96, cfg, x, 0.05) == loop);
  CHECK(step_count(cfg, 0.05) == 10);

  CHECK_THROWS_AS(propagate(l96, cfg, x, 0.0123), ValidationError);
  CHECK_THROWS_AS(propagate(l96, cfg, x, -0.05), ValidationError);

  Eigen::MatrixXd members(40, 3);
  for (int i = 0; i < 3; ++i) members.col(i) = random_vector(40, rng);
  const Eigen::MatrixXd moved = propagate_members(l96, cfg, members, 0.05);
  for (int i = 0; i < 3; ++i)
    CHECK(moved.col(i) == propagate(l96, cfg, Eigen::VectorXd(members.col(i)), 0.05));
}

TEST_CASE("chaotic trajectory stays bounded") {
  const Lorenz96 l96(40);
  const IntegratorConfig cfg;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(40, 8.0);
  x(0) += 0.01;
  for (int s = 0; s < 2000; ++s) x = step(l96, cfg, x);
  double peak = 0.0;
  for (int s = 0; s < 10000; ++s) {
    x = step(l96, cfg, x);
    peak = std::max(peak, x.cwiseAbs().maxCoeff());
  }
  CHECK(peak < 25.0);
  CHECK(peak > 5.0);
}
