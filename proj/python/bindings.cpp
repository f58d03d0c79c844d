#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "enkf/config_io.hpp"
#include "enkf/ensemble.hpp"
#include "enkf/errors.hpp"
#include "enkf/filters.hpp"
#include "enkf/harness.hpp"
#include "enkf/localization.hpp"
#include "enkf/models.hpp"
#include "enkf/observation.hpp"
#include "enkf/selftest.hpp"

namespace py = pybind11;
using namespace enkf;

namespace {

const TaperMatrices* opt(const std::optional<TaperMatrices>& t) { return t ? &*t : nullptr; }

void bind_core(py::module_& m) {
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<LinearSolveError>(m, "LinearSolveError", PyExc_ArithmeticError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_ArithmeticError);

  py::class_<Ensemble>(m, "Ensemble")
      .def(py::init<Eigen::MatrixXd>(), py::arg("states"))
      .def_property_readonly("states", &Ensemble::states)
      .def_property_readonly("dim", &Ensemble::dim)
      .def_property_readonly("size", &Ensemble::size);
  py::implicitly_convertible<Eigen::MatrixXd, Ensemble>();

  py::class_<EnsembleStats>(m, "EnsembleStats")
      .def_readonly("mean", &EnsembleStats::mean)
      .def_readonly("deviations", &EnsembleStats::deviations);
  m.def("stats", &stats, py::arg("ensemble"));
  m.def("covariance", [](const Ensemble& e) { return covariance(stats(e)); },
        py::arg("ensemble"));
  m.def("cross_products",
        [](const Ensemble& e, const LinearObservation& h) {
          auto cp = cross_products(stats(e), h);
          return py::make_tuple(cp.hp, cp.hpht);
        },
        py::arg("ensemble"), py::arg("h"));
  m.def("inflate", &inflate, py::arg("ensemble"), py::arg("delta"));

  py::class_<LinearObservation>(m, "LinearObservation")
      .def_static("selection", &LinearObservation::selection, py::arg("indices"), py::arg("n"))
      .def_static("dense", &LinearObservation::dense, py::arg("h"))
      .def_static("every_nth", &LinearObservation::every_nth, py::arg("n"), py::arg("stride"),
                  py::arg("offset") = 0)
      .def_property_readonly("obs_dim", &LinearObservation::obs_dim)
      .def_property_readonly("state_dim", &LinearObservation::state_dim)
      .def_property_readonly("indices", &LinearObservation::indices)
      .def("apply", py::overload_cast<const Eigen::MatrixXd&>(&LinearObservation::apply,
                                                               py::const_))
      .def("to_dense", &LinearObservation::to_dense);

  py::class_<ObsError>(m, "ObsError")
      .def_static("diagonal", &ObsError::diagonal, py::arg("variances"))
      .def_static("identity", &ObsError::identity, py::arg("k"))
      .def_static("full", &ObsError::full, py::arg("r"))
      .def("dense", &ObsError::dense)
      .def("precision_apply",
           py::overload_cast<const Eigen::VectorXd&>(&ObsError::precision_apply, py::const_));
}

void bind_localization(py::module_& m) {
  py::enum_<TaperKind>(m, "TaperKind")
      .value("gaspari_cohn", TaperKind::gaspari_cohn)
      .value("gaussian", TaperKind::gaussian)
      .value("none", TaperKind::none);
  py::enum_<RadiusConvention>(m, "RadiusConvention")
      .value("half_support", RadiusConvention::half_support)
      .value("full_support", RadiusConvention::full_support);
  py::class_<TaperFunction>(m, "TaperFunction")
      .def(py::init([](TaperKind k, double r0, RadiusConvention c) {
             return TaperFunction{k, r0, c};
           }),
           py::arg("kind"), py::arg("radius") = 1.0,
           py::arg("convention") = RadiusConvention::half_support)
      .def_readwrite("kind", &TaperFunction::kind)
      .def_readwrite("radius", &TaperFunction::radius)
      .def_readwrite("convention", &TaperFunction::convention);
  py::class_<TaperMatrices>(m, "TaperMatrices")
      .def(py::init<Eigen::MatrixXd, Eigen::MatrixXd>(), py::arg("c1"), py::arg("c2"))
      .def_readonly("c1", &TaperMatrices::c1)
      .def_readonly("c2", &TaperMatrices::c2);
  m.def("taper_value", &taper_value, py::arg("f"), py::arg("r"));
  m.def("build_tapers_ring",
        [](Eigen::Index n, const TaperFunction& f, const std::vector<Eigen::Index>& locs) {
          return build_tapers(RingMetric{n}, f, locs, n);
        },
        py::arg("n"), py::arg("f"), py::arg("obs_locations"));
  m.def("build_tapers_grid",
        [](Eigen::Index rows, Eigen::Index cols, const TaperFunction& f,
           const std::vector<Eigen::Index>& locs) {
          return build_tapers(GridMetric{rows, cols}, f, locs, rows * cols);
        },
        py::arg("rows"), py::arg("cols"), py::arg("f"), py::arg("obs_locations"));
  m.def("schur", &schur);
}

void bind_models(py::module_& m) {
  py::class_<Lorenz96>(m, "Lorenz96")
      .def(py::init<Eigen::Index, double>(), py::arg("n") = 40, py::arg("forcing") = 8.0)
      .def("rhs", &Lorenz96::rhs);
  py::enum_<Scheme>(m, "Scheme")
      .value("implicit_midpoint", Scheme::implicit_midpoint)
      .value("rk4", Scheme::rk4);
  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init<>())
      .def_readwrite("scheme", &IntegratorConfig::scheme)
      .def_readwrite("dt", &IntegratorConfig::dt)
      .def_readwrite("tol", &IntegratorConfig::tol)
      .def_readwrite("max_iters", &IntegratorConfig::max_iters);
  m.def("step", [](const Lorenz96& md, const IntegratorConfig& c,
                   const Eigen::VectorXd& x) { return step(md, c, x); });
  m.def("propagate", [](const Lorenz96& md, const IntegratorConfig& c, Eigen::VectorXd x,
                        double duration) { return propagate(md, c, std::move(x), duration); });
}

void bind_filters(py::module_& m) {
  py::enum_<FilterKind>(m, "FilterKind")
      .value("enkf_perturbed", FilterKind::enkf_perturbed)
      .value("esrf_sequential", FilterKind::esrf_sequential)
      .value("denkf", FilterKind::denkf)
      .value("cenkf1", FilterKind::cenkf1)
      .value("cenkf2", FilterKind::cenkf2)
      .value("kalman_oracle", FilterKind::kalman_oracle);

  py::class_<AnalysisReport>(m, "AnalysisReport")
      .def_property_readonly("analysis", [](const AnalysisReport& r) { return r.analysis.states(); })
      .def_readonly("mean", &AnalysisReport::mean)
      .def_readonly("deviations", &AnalysisReport::deviations)
      .def_readonly("potential_trace", &AnalysisReport::potential_trace)
      .def_readonly("increments_norm", &AnalysisReport::increments_norm)
      .def_readonly("warnings", &AnalysisReport::warnings);

  m.def("kalman_oracle",
        [](const Ensemble& f, const Eigen::VectorXd& y, const LinearObservation& h,
           const ObsError& r, const std::optional<TaperMatrices>& loc) {
          auto o = kalman_oracle(f, y, h, r, opt(loc));
          return py::make_tuple(o.report, o.gain, o.covariance);
        },
        py::arg("forecast"), py::arg("y"), py::arg("h"), py::arg("r"),
        py::arg("loc") = std::nullopt);
  m.def("enkf_perturbed",
        [](const Ensemble& f, const Eigen::VectorXd& y, const LinearObservation& h,
           const ObsError& r, const std::optional<TaperMatrices>& loc, std::uint64_t seed) {
          Rng rng(seed);
          return enkf_perturbed(f, y, h, r, opt(loc), rng);
        },
        py::arg("forecast"), py::arg("y"), py::arg("h"), py::arg("r"),
        py::arg("loc") = std::nullopt, py::arg("seed") = 0);
  m.def("esrf_sequential",
        [](const Ensemble& f, const Eigen::VectorXd& y, const LinearObservation& h,
           const ObsError& r, const std::optional<TaperMatrices>& loc) {
          return esrf_sequential(f, y, h, r, opt(loc));
        },
        py::arg("forecast"), py::arg("y"), py::arg("h"), py::arg("r"),
        py::arg("loc") = std::nullopt);
  m.def("denkf",
        [](const Ensemble& f, const Eigen::VectorXd& y, const LinearObservation& h,
           const ObsError& r, const std::optional<TaperMatrices>& loc) {
          return denkf(f, y, h, r, opt(loc));
        },
        py::arg("forecast"), py::arg("y"), py::arg("h"), py::arg("r"),
        py::arg("loc") = std::nullopt);
  m.def("cenkf1",
        [](const Ensemble& f, const Eigen::VectorXd& y, const LinearObservation& h,
           const ObsError& r, const std::optional<TaperMatrices>& loc, int steps) {
          return cenkf1(f, y, h, r, opt(loc), steps);
        },
        py::arg("forecast"), py::arg("y"), py::arg("h"), py::arg("r"),
        py::arg("loc") = std::nullopt, py::arg("steps") = 4);
  m.def("cenkf2",
        [](const Ensemble& f, const Eigen::VectorXd& y, const LinearObservation& h,
           const ObsError& r, const std::optional<TaperMatrices>& loc, int steps) {
          return cenkf2(f, y, h, r, opt(loc), steps);
        },
        py::arg("forecast"), py::arg("y"), py::arg("h"), py::arg("r"),
        py::arg("loc") = std::nullopt, py::arg("steps") = 4);
  m.def("potential",
        py::overload_cast<const Eigen::MatrixXd&, const Eigen::VectorXd&,
                          const LinearObservation&, const ObsError&>(&potential),
        py::arg("members"), py::arg("y"), py::arg("h"), py::arg("r"));
}

void bind_harness(py::module_& m) {
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("n", &ExperimentConfig::n)
      .def_readwrite("members", &ExperimentConfig::members)
      .def_readwrite("obs_stride", &ExperimentConfig::obs_stride)
      .def_readwrite("obs_offset", &ExperimentConfig::obs_offset)
      .def_readwrite("obs_variance", &ExperimentConfig::obs_variance)
      .def_readwrite("obs_interval", &ExperimentConfig::obs_interval)
      .def_readwrite("spinup_cycles", &ExperimentConfig::spinup_cycles)
      .def_readwrite("cycles", &ExperimentConfig::cycles)
      .def_readwrite("filter", &ExperimentConfig::filter)
      .def_readwrite("inflation", &ExperimentConfig::inflation)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("taper", &ExperimentConfig::taper)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("initial_spread", &ExperimentConfig::initial_spread)
      .def_readwrite("truth_spinup_steps", &ExperimentConfig::truth_spinup_steps)
      .def_readwrite("integrator", &ExperimentConfig::integrator);

  py::class_<CycleRecord>(m, "CycleRecord")
      .def_readonly("cycle", &CycleRecord::cycle)
      .def_readonly("forecast_rmse", &CycleRecord::forecast_rmse)
      .def_readonly("analysis_rmse", &CycleRecord::analysis_rmse)
      .def_readonly("potential_start", &CycleRecord::potential_start)
      .def_readonly("potential_end", &CycleRecord::potential_end)
      .def_readonly("warnings", &CycleRecord::warnings);
  py::class_<SweepCell>(m, "SweepCell")
      .def_readonly("filter", &SweepCell::filter)
      .def_readonly("delta", &SweepCell::delta)
      .def_readonly("r0", &SweepCell::r0)
      .def_readonly("seed", &SweepCell::seed)
      .def_readonly("cycles", &SweepCell::cycles)
      .def_readonly("rmse", &SweepCell::rmse)
      .def_readonly("diverged", &SweepCell::diverged);
  py::class_<TwinResult>(m, "TwinResult")
      .def_readonly("cell", &TwinResult::cell)
      .def_readonly("records", &TwinResult::records)
      .def_readonly("failure", &TwinResult::failure);
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("deltas", &SweepResult::deltas)
      .def_readonly("radii", &SweepResult::radii)
      .def_readonly("cells", &SweepResult::cells)
      .def("best", &SweepResult::best)
      .def("__eq__", [](const SweepResult& a, const SweepResult& b) { return a == b; });

  m.def("rmse_of", &rmse_of, py::arg("means"), py::arg("truths"));
  m.def("run_twin", &run_twin, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_sweep", &run_sweep, py::arg("base"), py::arg("deltas"), py::arg("radii"),
        py::arg("parallel") = false, py::arg("threads") = 0u,
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep_csv", &sweep_csv);
  m.def("parse_sweep_csv", &parse_sweep_csv);
  m.def("cycle_csv", &cycle_csv);
  m.def("selftest", [] {
    py::list out;
    for (const auto& r : run_selftest()) out.append(py::make_tuple(r.name, r.passed, r.detail));
    return out;
  });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Localized ensemble Kalman filters and Lorenz-96 twin experiments";
  bind_core(m);
  bind_localization(m);
  bind_models(m);
  bind_filters(m);
  bind_harness(m);
}
