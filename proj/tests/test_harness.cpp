#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "enkf/config_io.hpp"
#include "enkf/errors.hpp"
#include "enkf/harness.hpp"

using namespace enkf;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.spinup_cycles = 10;
  cfg.cycles = 40;
  cfg.truth_spinup_steps = 2000;
  cfg.inflation = 1.05;
  cfg.taper = TaperFunction::gaspari_cohn(6.0);
  return cfg;
}

std::vector<double> analysis_rmses(const TwinResult& r) {
  std::vector<double> out;
  for (const auto& rec : r.records) out.push_back(rec.analysis_rmse);
  return out;
}

}  // namespace

TEST_CASE("rmse_of") {
  const Eigen::Vector4d zero = Eigen::Vector4d::Zero();
  CHECK(rmse_of({zero}, {zero}) == 0.0);
  CHECK(rmse_of({Eigen::Vector4d::Ones()}, {zero}) == doctest::Approx(1.0));
  const Eigen::VectorXd z1 = Eigen::VectorXd::Zero(1);
  CHECK(rmse_of({Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, 4.0)}, {z1, z1}) ==
        doctest::Approx(std::sqrt(12.5)));
  CHECK_THROWS_AS(rmse_of({}, {}), ValidationError);
  CHECK_THROWS_AS(rmse_of({zero}, {zero, zero}), DimensionError);
}

TEST_CASE("experiment validation") {
  auto cfg = small_config();
  cfg.members = 1;
  CHECK_THROWS_AS(run_twin(cfg), ValidationError);
  cfg = small_config();
  cfg.obs_interval = 0.0512;
  CHECK_THROWS_AS(run_twin(cfg), ValidationError);
  cfg = small_config();
  cfg.inflation = 0.99;
  CHECK_THROWS_AS(run_twin(cfg), ValidationError);
}

TEST_CASE("perfect observations pin the state") {
  for (auto kind : {FilterKind::enkf_perturbed, FilterKind::esrf_sequential, FilterKind::denkf,
                    FilterKind::kalman_oracle}) {
    CAPTURE(to_string(kind));
    auto cfg = small_config();
    cfg.filter = kind;
    cfg.obs_stride = 1;
    cfg.obs_variance = 1e-12;
    cfg.inflation = 1.0;
    cfg.taper = TaperFunction::gaspari_cohn(0.5);
    cfg.spinup_cycles = 0;
    cfg.cycles = 10;
    const auto res = run_twin(cfg);
    REQUIRE(res.records.size() == 10);
    CHECK_FALSE(res.cell.diverged);
    for (const auto& rec : res.records) CHECK(rec.analysis_rmse < 1e-3);
  }
}

TEST_CASE("zero recorded cycles") {
  auto cfg = small_config();
  cfg.cycles = 0;
  const auto res = run_twin(cfg);
  CHECK(res.records.empty());
  CHECK_FALSE(res.cell.diverged);
}

TEST_CASE("records carry forecast and analysis diagnostics") {
  auto cfg = small_config();
  const auto res = run_twin(cfg);
  REQUIRE(res.records.size() == 40);
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < res.records.size(); ++j) {
    const auto& rec = res.records[j];
    CHECK(rec.cycle == int(j));
    CHECK(rec.analysis_rmse >= 0.0);
    CHECK(rec.forecast_rmse >= 0.0);
    REQUIRE(rec.potential_start.has_value());
    REQUIRE(rec.potential_end.has_value());
    CHECK(*rec.potential_end <= *rec.potential_start);
    sum_sq += rec.analysis_rmse * rec.analysis_rmse;
  }
  CHECK(res.cell.rmse == doctest::Approx(std::sqrt(sum_sq / 40.0)));
  CHECK(res.cell.rmse < 1.0);

  cfg.filter = FilterKind::denkf;
  const auto other = run_twin(cfg);
  CHECK_FALSE(other.records.front().potential_start.has_value());
}

TEST_CASE("same seed gives identical runs") {
  for (auto kind : {FilterKind::enkf_perturbed, FilterKind::cenkf2}) {
    auto cfg = small_config();
    cfg.filter = kind;
    const auto a = run_twin(cfg);
    const auto b = run_twin(cfg);
    CHECK(analysis_rmses(a) == analysis_rmses(b));
    CHECK(cycle_csv(a.records) == cycle_csv(b.records));
    cfg.seed = 43;
    CHECK(analysis_rmses(run_twin(cfg)) != analysis_rmses(a));
  }
}

TEST_CASE("seed isolation across filter variants") {
  // With no spin-up the first forecast depends only on truth and the
  // initial ensemble, so every filter must report the same value.
  auto cfg = small_config();
  cfg.spinup_cycles = 0;
  cfg.cycles = 2;
  std::vector<double> first;
  for (auto kind : {FilterKind::enkf_perturbed, FilterKind::esrf_sequential, FilterKind::denkf,
                    FilterKind::cenkf1, FilterKind::cenkf2}) {
    cfg.filter = kind;
    first.push_back(run_twin(cfg).records.front().forecast_rmse);
  }
  for (double v : first) CHECK(v == first.front());

  // Deterministic filters are unaffected by the perturbation stream.
  cfg.filter = FilterKind::denkf;
  const auto a = run_twin(cfg);
  cfg.recenter_perturbations = true;
  CHECK(analysis_rmses(run_twin(cfg)) == analysis_rmses(a));

  auto obs = make_stream(7, Stream::observations);
  auto obs2 = make_stream(7, Stream::observations);
  auto pert = make_stream(7, Stream::perturbations);
  auto init = make_stream(7, Stream::initial_ensemble);
  const auto o = obs();
  CHECK(o == obs2());
  CHECK(o != pert());
  CHECK(o != init());
}

TEST_CASE("sweeps") {
  auto cfg = small_config();
  cfg.cycles = 30;

  SUBCASE("a single cell equals run_twin") {
    const auto sweep = run_sweep(cfg, {1.05}, {6.0});
    REQUIRE(sweep.cells.size() == 1);
    const auto twin = run_twin(cfg);
    CHECK(sweep.cells[0].rmse == round_sig6(twin.cell.rmse));
    CHECK(sweep.cells[0].diverged == twin.cell.diverged);
    CHECK(sweep.cells[0].seed == cfg.seed);
    CHECK(sweep.cells[0].filter == cfg.filter);
  }

  SUBCASE("an unstable cell does not disturb its neighbours") {
    cfg.filter = FilterKind::cenkf2;
    cfg.truth_spinup_steps = ExperimentConfig{}.truth_spinup_steps;
    const auto sweep = run_sweep(cfg, {1.02, 1.5}, {6.0, 40.0});
    CHECK(sweep.at(1, 1).diverged);
    CHECK(std::isinf(sweep.at(1, 1).rmse));
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK_FALSE(sweep.at(0, k).diverged);
      CHECK(std::isfinite(sweep.at(0, k).rmse));
    }
    for (const auto& c : sweep.cells) CHECK(c.diverged == std::isinf(c.rmse));
    REQUIRE(sweep.best().has_value());
    CHECK_FALSE(sweep.best()->diverged);
  }

  SUBCASE("parallel and serial agree") {
    const std::vector<double> deltas{1.01, 1.05};
    const std::vector<double> radii{4.0, 10.0, 20.0};
    const auto serial = run_sweep(cfg, deltas, radii, false);
    const auto parallel = run_sweep(cfg, deltas, radii, true, 3);
    CHECK(serial == parallel);
    CHECK(sweep_csv(serial) == sweep_csv(parallel));
  }

  SUBCASE("CSV round trip") {
    const auto sweep = run_sweep(cfg, {1.02, 1.5}, {6.0, 40.0});
    const std::string text = sweep_csv(sweep);
    CHECK(text.rfind("filter,delta,r0,seed,cycles,rmse,diverged\n", 0) == 0);
    const auto back = parse_sweep_csv(text);
    CHECK(back == sweep);
    CHECK(sweep_csv(back) == text);
  }

  SUBCASE("empty grids are rejected") {
    CHECK_THROWS_AS(run_sweep(cfg, {}, {1.0}), ValidationError);
  }
}

TEST_CASE("CSV formatting") {
  SweepResult s;
  s.deltas = {1.05};
  s.radii = {15};
  SweepCell c;
  c.filter = FilterKind::denkf;
  c.delta = 1.05;
  c.r0 = 15;
  c.seed = 42;
  c.cycles = 2000;
  c.rmse = round_sig6(0.123456789);
  s.cells = {c};
  CHECK(sweep_csv(s) == "filter,delta,r0,seed,cycles,rmse,diverged\ndenkf,1.05,15,42,2000,0.123457,0\n");
  CHECK(round_sig6(1234567.0) == 1234570.0);
  CHECK_THROWS_AS(parse_sweep_csv("filter,delta\n"), ValidationError);

  CycleRecord rec;
  rec.cycle = 3;
  rec.forecast_rmse = 0.5;
  rec.analysis_rmse = 0.25;
  rec.potential_start = 10.0;
  rec.potential_end = 2.0;
  rec.warnings = {"a, b", "c"};
  const std::string csv = cycle_csv({rec});
  CHECK(csv.rfind("cycle,forecast_rmse,analysis_rmse,potential_start,potential_end,warnings\n", 0) == 0);
  CHECK(csv.find("\"a, b;c\"") != std::string::npos);
}

TEST_CASE("JSON configuration") {
  RunOptions opts;
  merge_json(opts, R"({"n": 20, "members": 12, "filter": "denkf", "inflation": 1.08,
                       "radius": 6, "taper": "gaussian", "cycles": 50, "spinup": 5,
                       "seed": 9, "deltas": [1.01, 1.02], "parallel": true})");
  CHECK(opts.experiment.n == 20);
  CHECK(opts.experiment.members == 12);
  CHECK(opts.experiment.filter == FilterKind::denkf);
  CHECK(opts.experiment.inflation == 1.08);
  CHECK(opts.experiment.taper.kind == TaperKind::gaussian);
  CHECK(opts.experiment.taper.radius == 6.0);
  CHECK(opts.experiment.cycles == 50);
  CHECK(opts.experiment.spinup_cycles == 5);
  CHECK(opts.experiment.seed == 9);
  CHECK(opts.deltas == std::vector<double>{1.01, 1.02});
  CHECK(opts.parallel);

  RunOptions again;
  merge_json(again, to_json(opts));
  CHECK(to_json(again) == to_json(opts));

  CHECK_THROWS_AS(merge_json(opts, R"({"colour": 1})"), ValidationError);
  CHECK_THROWS_AS(merge_json(opts, R"({"n": "forty"})"), ValidationError);
  CHECK_THROWS_AS(merge_json(opts, "{not json"), ValidationError);
  CHECK_THROWS_AS(merge_json(opts, R"({"model": "lorenz63"})"), ValidationError);
  CHECK_THROWS_AS(parse_taper("box"), ValidationError);
  CHECK(parse_radius_convention("full") == RadiusConvention::full_support);
}
