import math

import numpy as np
import pytest

import enkf


def example_ensemble():
    return enkf.Ensemble(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))


def test_stats_and_covariance():
    s = enkf.stats(example_ensemble())
    np.testing.assert_allclose(s.mean, [1 / 3, 1 / 3])
    np.testing.assert_allclose(s.deviations.sum(axis=1), 0.0, atol=1e-15)
    np.testing.assert_allclose(
        enkf.covariance(example_ensemble()), [[1 / 3, -1 / 6], [-1 / 6, 1 / 3]]
    )


def test_invalid_ensemble_raises():
    with pytest.raises(enkf.DimensionError):
        enkf.Ensemble(np.zeros((3, 1)))


def test_taper_values():
    gc = enkf.TaperFunction(enkf.TaperKind.gaspari_cohn, 1.0)
    assert enkf.taper_value(gc, 0.0) == 1.0
    assert enkf.taper_value(gc, 1.0) == pytest.approx(5 / 24)
    assert enkf.taper_value(gc, 2.0) == 0.0
    tapers = enkf.build_tapers_ring(8, gc, [0, 2, 4, 6])
    assert tapers.c1.shape == (8, 4)
    np.testing.assert_allclose(tapers.c2, tapers.c2.T)


def test_oracle_example():
    h = enkf.LinearObservation.selection([0], 2)
    r = enkf.ObsError.identity(1)
    report, gain, cov = enkf.kalman_oracle(example_ensemble(), np.array([2.0]), h, r)
    np.testing.assert_allclose(gain[:, 0], [0.25, -0.125])
    np.testing.assert_allclose(report.mean, [0.75, 0.125])
    np.testing.assert_allclose(cov, [[0.25, -0.125], [-0.125, 0.3125]], atol=1e-14)


def test_filters_agree_with_oracle_on_mean():
    rng = np.random.default_rng(3)
    ens = enkf.Ensemble(rng.normal(size=(6, 8)))
    h = enkf.LinearObservation.every_nth(6, 2)
    r = enkf.ObsError.diagonal(np.full(3, 0.5))
    y = rng.normal(size=3)
    oracle, _, cov = enkf.kalman_oracle(ens, y, h, r)
    for rep in (enkf.esrf_sequential(ens, y, h, r), enkf.denkf(ens, y, h, r)):
        np.testing.assert_allclose(rep.mean, oracle.mean, rtol=1e-10)
    esrf = enkf.esrf_sequential(ens, y, h, r)
    np.testing.assert_allclose(enkf.covariance(enkf.Ensemble(esrf.analysis)), cov, atol=1e-10)


def test_cenkf_variants():
    rng = np.random.default_rng(4)
    ens = enkf.Ensemble(rng.normal(size=(10, 6)) + 2.0)
    h = enkf.LinearObservation.every_nth(10, 2)
    r = enkf.ObsError.identity(5)
    y = rng.normal(size=5)
    loc = enkf.build_tapers_ring(10, enkf.TaperFunction(enkf.TaperKind.gaspari_cohn, 3.0), h.indices)
    a = enkf.cenkf1(ens, y, h, r, loc, steps=1)
    b = enkf.cenkf2(ens, y, h, r, loc, steps=1)
    np.testing.assert_allclose(a.analysis, b.analysis, rtol=1e-12)
    rep = enkf.cenkf1(ens, y, h, r, loc)
    assert len(rep.potential_trace) == 5
    assert rep.potential_trace[-1] < rep.potential_trace[0]
    assert rep.potential_trace[0] == pytest.approx(enkf.potential(ens.states, y, h, r))


def test_lorenz96_step():
    model = enkf.Lorenz96(40)
    np.testing.assert_allclose(model.rhs(np.zeros(40)), 8.0)
    x = enkf.step(model, enkf.IntegratorConfig(), np.zeros(40))
    assert np.max(np.abs(x - 0.04)) < 1e-3


def test_rmse_of():
    assert enkf.rmse_of([np.array([3.0]), np.array([4.0])], [np.zeros(1), np.zeros(1)]) == (
        pytest.approx(math.sqrt(12.5))
    )


def small_config():
    cfg = enkf.ExperimentConfig()
    cfg.cycles = 20
    cfg.spinup_cycles = 5
    cfg.truth_spinup_steps = 1000
    cfg.inflation = 1.05
    cfg.taper = enkf.TaperFunction(enkf.TaperKind.gaspari_cohn, 6.0)
    return cfg


def test_run_twin_is_deterministic():
    cfg = small_config()
    a = enkf.run_twin(cfg)
    b = enkf.run_twin(cfg)
    assert len(a.records) == 20
    assert [r.analysis_rmse for r in a.records] == [r.analysis_rmse for r in b.records]
    assert not a.cell.diverged
    assert enkf.cycle_csv(a.records).startswith(
        "cycle,forecast_rmse,analysis_rmse,potential_start,potential_end,warnings\n"
    )


def test_sweep_round_trip():
    cfg = small_config()
    cfg.filter = enkf.FilterKind.denkf
    sweep = enkf.run_sweep(cfg, [1.02, 1.05], [4.0, 10.0])
    parallel = enkf.run_sweep(cfg, [1.02, 1.05], [4.0, 10.0], parallel=True, threads=2)
    assert sweep == parallel
    text = enkf.sweep_csv(sweep)
    assert text.splitlines()[0] == "filter,delta,r0,seed,cycles,rmse,diverged"
    assert len(text.splitlines()) == 5
    assert enkf.parse_sweep_csv(text) == sweep
    assert sweep.best() is not None


def test_selftest():
    results = enkf.selftest()
    assert results
    assert all(passed for _, passed, _ in results), results
