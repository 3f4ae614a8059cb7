import math

import numpy as np
import pytest

from isinglab.errors import BudgetError, FitError, GeometryError
from isinglab.lab.exponents import (ScalingSeries, alpha_from_assumptions, arm_checks,
                                    arm_scaling, assemble_arm, autocorrelation_checks,
                                    autocorrelation_mc, averaged_arm, averaged_arm_ratio,
                                    exact_autocorrelation, fit_power_law, geometric_time_grid,
                                    lsi_scaling, make_series, merge_units, oracle_agreement,
                                    plan_arm, plan_units, run_unit, shell_sum, shell_sum_check,
                                    shell_sum_series)
from isinglab.lab.gibbs import BoundaryCondition, Estimate, beta_critical
from isinglab.lab.lattice import build_geometry
from isinglab.lab.spectral import LsiSearchConfig, build_generator, lsi_constant

BETA_C = beta_critical(2)
SMALL_SEARCH = LsiSearchConfig(restarts=2, random_candidates=300, max_rounds=2)


def test_fit_exact_power_law():
    x = np.arange(1.0, 11.0)
    fitted = fit_power_law(make_series("exact", x, 7.0 * x**-0.5), n_bootstrap=50)

    assert fitted.fitted
    assert abs(fitted.exponent + 0.5) < 1e-12
    assert abs(fitted.intercept - 7.0) < 1e-10
    assert fitted.exponent_stderr < 1e-10
    assert fitted.window == (1.0, 10.0)


def test_fit_constant_series():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    fitted = fit_power_law(make_series("flat", x, np.full(4, 3.0)), n_bootstrap=20)

    assert abs(fitted.exponent) < 1e-12
    assert fitted.chi2_reduced < 1e-20


def test_fit_noisy_series_recovers_exponent():
    rng = np.random.default_rng(4)
    x = np.geomspace(1.0, 100.0, 12)
    clean = 2.0 / x
    values = clean * (1.0 + 0.01 * rng.standard_normal(len(x)))
    fitted = fit_power_law(make_series("noisy", x, values, 0.01 * clean), n_bootstrap=400)

    assert fitted.exponent_stderr > 0
    assert abs(fitted.exponent + 1.0) < 5 * fitted.exponent_stderr
    assert 0.1 < fitted.chi2_reduced < 5.0


def test_fit_window_and_failures():
    x = np.arange(1.0, 11.0)
    series = make_series("s", x, x**-1.0)

    assert fit_power_law(series, window=(2.0, 8.0), n_bootstrap=10).window == (2.0, 8.0)
    with pytest.raises(FitError):
        fit_power_law(series, window=(2.0, 3.0))
    with pytest.raises(FitError):
        fit_power_law(make_series("neg", [1, 2, 3], [1.0, -1.0, 0.5]))
    with pytest.raises(FitError):
        fit_power_law(make_series("noise", [1, 2, 3], [1.0, 0.5, 0.01], [0.01, 0.01, 0.01]))


def test_series_validation_and_dict():
    with pytest.raises(ValueError):
        make_series("bad", [2, 1], [1.0, 1.0])
    with pytest.raises(ValueError):
        make_series("bad", [1, 2], [1.0, 1.0], [0.1, -0.1])

    series = make_series("s", [1, 2], [0.5, 0.25]).with_note("hello")
    again = ScalingSeries.from_dict(series.to_dict())
    assert again.rows() == series.rows()
    assert again.notes == ("hello",)
    assert not again.fitted


def test_shell_sum_smallest_size():
    for d in (2, 3):
        assert shell_sum(d, 1.0, 2) == 2.0**-d
    with pytest.raises(ValueError):
        shell_sum(2, 1.0, 1)
    with pytest.raises(ValueError):
        shell_sum(2, 1.0, 10**6 + 1)


def test_shell_sum_bounded():
    for d, delta in ((2, 1.0), (3, 1.0), (2, 0.25), (3, 0.75)):
        (report,) = shell_sum_check(d, delta, [10, 100, 1000, 10000])
        assert report.inequality == "shell_sum_bounded"
        assert report.passed
        assert report.details["points"] == 2


def test_shell_sum_plateau_value():
    series = shell_sum_series(2, 1.0, [100000])
    # S(L)·L tends to ζ(2) for d = 2 and δ = 1
    assert abs(series.values[0] - math.pi**2 / 6) < 1e-3


def test_shell_sum_rejects_half():
    with pytest.raises(ValueError):
        shell_sum_series(2, 0.5, [10, 100])
    with pytest.raises(ValueError):
        shell_sum_check(2, 1.5, [10, 100])


def test_alpha_from_assumptions():
    assert alpha_from_assumptions(1.0, 2.0) == 0.25
    assert alpha_from_assumptions(0.5, 1.0) == 0.5
    assert alpha_from_assumptions(0.25, 1.0) == 0.25
    with pytest.raises(ValueError):
        alpha_from_assumptions(0.0, 1.0)
    with pytest.raises(ValueError):
        alpha_from_assumptions(1.0, 0.0)


def test_arm_exact_small_sizes():
    series = arm_scaling(2, [1, 0])

    assert series.abscissae.tolist() == [0.0, 1.0]
    assert abs(series.values[0] - math.tanh(4 * BETA_C)) < 1e-12
    assert 0 < series.values[1] < series.values[0]
    assert not series.fitted
    assert series.notes[0].startswith("no fit")
    assert all(r.passed for r in arm_checks(series))


def test_arm_at_infinite_temperature():
    series = arm_scaling(2, [0, 1], beta=0.0)
    assert np.all(np.abs(series.values) < 1e-12)


def test_arm_plan_rejects_negative():
    with pytest.raises(ValueError):
        plan_arm(2, [-1, 2], None, 0, None)


def test_arm_fit_and_literature_note():
    points = plan_arm(2, [1, 2, 4, 8], 1000, 0, None)
    estimates = [Estimate(p.L**-0.5, 1e-5, 1000, "mc") for p in points]
    series = assemble_arm(points, estimates, n_bootstrap=200)

    assert abs(series.exponent + 0.5) < 1e-3
    assert any("1/8" in note for note in series.notes)
    assert all(r.passed for r in arm_checks(series))


def test_arm_checks_flag_growth():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    series = fit_power_law(make_series("arm", x, x**0.5, np.full(4, 1e-4)), n_bootstrap=100)
    reports = {r.inequality: r for r in arm_checks(series)}

    assert not reports["arm_monotone"].passed
    assert not reports["arm_delta_positive"].passed
    assert reports["arm_delta_at_most_one"].passed


def test_averaged_arm_exact_and_trivial():
    value, err = averaged_arm(2, 0)
    assert abs(value - math.tanh(4 * BETA_C) ** 2) < 1e-12
    assert err == 0.0

    assert averaged_arm(2, 3, beta=0.0) == (0.0, 0.0)
    with pytest.raises(BudgetError):
        averaged_arm(2, 2, budget=10)


def test_averaged_arm_ratio_skips_origin():
    series = averaged_arm_ratio([0, 1, 2], [(0.9, 0.0), (0.5, 0.01), (0.3, 0.02)], delta=1.0)

    assert series.abscissae.tolist() == [1.0, 2.0]
    assert series.values.tolist() == [0.5, 0.6]
    assert series.stderrs.tolist() == [0.01, 0.04]
    with pytest.raises(ValueError):
        averaged_arm_ratio([1], [(0.5, 0.0)], delta=0.0)


def test_geometric_time_grid():
    grid = geometric_time_grid(1.0, t0=0.1, ratio=2.0)

    assert np.allclose(grid, [0.0, 0.1, 0.2, 0.4, 0.8, 1.0])
    assert geometric_time_grid(0.1, include_zero=False).tolist() == [0.1]
    with pytest.raises(ValueError):
        geometric_time_grid(1.0, t0=0.0)


def test_exact_autocorrelation_at_infinite_temperature():
    times = np.array([0.0, 0.5, 2.0])
    est = exact_autocorrelation(2, 1, "heatbath", times, beta=0.0)

    assert est.method == "exact"
    assert np.allclose(est.values, np.exp(-times), atol=1e-12)
    assert all(r.passed for r in autocorrelation_checks(est))


def test_autocorrelation_mc_matches_exact():
    times = geometric_time_grid(4.0, t0=0.1, ratio=1.5)
    mc = autocorrelation_mc(2, 1, "heatbath", times, replicas=400, seed=3)
    exact = exact_autocorrelation(2, 1, "heatbath", times)

    assert mc.replicas == 400
    assert mc.values[0] == 1.0
    assert np.all(mc.stderrs[1:] > 0)
    assert oracle_agreement(mc, exact).passed
    assert all(r.passed for r in autocorrelation_checks(mc))


def test_autocorrelation_mc_is_reproducible_across_mappers():
    times = [0.0, 0.5, 1.0]
    calls = []

    def recording_map(fn, items):
        items = list(items)
        calls.append(len(items))
        return [fn(item) for item in items]

    a = autocorrelation_mc(2, 1, "metropolis", times, replicas=60, seed=9)
    b = autocorrelation_mc(2, 1, "metropolis", times, replicas=60, seed=9, mapper=recording_map)

    assert calls == [2]
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.stderrs, b.stderrs)


def test_autocorrelation_mc_input_checks():
    with pytest.raises(ValueError, match="replicas >= 2"):
        autocorrelation_mc(2, 1, "heatbath", [0.0, 1.0], replicas=1)
    with pytest.raises(ValueError):
        autocorrelation_mc(2, 1, "heatbath", [1.0, 0.5], replicas=4)


def test_plan_and_merge_units():
    units = plan_units((2, 2), "heatbath", 0.0, np.array([0.0, 1.0]), 120, seed=1, unit_size=50)

    assert [u.count for u in units] == [50, 50, 20]
    assert [u.first for u in units] == [0, 50, 100]
    est = merge_units(units, [run_unit(u) for u in units])
    assert est.replicas == 120
    assert est.values[0] == 1.0


def test_oracle_agreement_needs_same_grid():
    a = exact_autocorrelation(2, 1, "heatbath", [0.0, 1.0])
    b = exact_autocorrelation(2, 1, "heatbath", [0.0, 2.0])
    with pytest.raises(ValueError):
        oracle_agreement(a, b)


def test_lsi_scaling_free_boxes():
    (result,) = lsi_scaling(2, [(2, 3), (1, 2), (2, 2)], cfg=SMALL_SEARCH)

    assert result.bc == "free"
    assert result.passed
    assert np.allclose(result.gap_inverse.abscissae, [2**0.5, 2.0, 6**0.5])
    assert len(result.gamma_inverse.values) == 3
    assert np.all(result.gamma_inverse.values >= result.gap_inverse.values * (1 - 1e-6))
    assert result.gap_inverse.fitted
    assert "indicative only" in result.gap_inverse.notes[-1]
    names = [r.inequality for r in result.reports]
    assert names.count("gap_solver_agreement") == 2
    assert names.count("gap_dominates_lsi") == 3


def test_lsi_scaling_periodic_and_dimension_check():
    (result,) = lsi_scaling(2, [(2, 2), (2, 4)], bc_list=("periodic",), cfg=SMALL_SEARCH)

    assert result.bc == "periodic"
    assert not result.gap_inverse.fitted
    assert result.to_dict()["gap_inverse"]["notes"][0].startswith("no fit")
    with pytest.raises(ValueError):
        lsi_scaling(2, [(2, 2, 2)], cfg=SMALL_SEARCH)


def test_lsi_scaling_grows_on_nested_free_boxes():
    search = LsiSearchConfig(restarts=3, random_candidates=2000, max_rounds=3)
    (result,) = lsi_scaling(2, [(3, 3), (1, 2), (2, 3), (2, 2)], cfg=search)
    reports = {r.inequality: r for r in result.reports}

    monotone = reports["gamma_inverse_monotone"]
    assert monotone.passed
    assert monotone.details["pairs"] == [[[1, 2], [2, 2]], [[2, 2], [2, 3]], [[2, 3], [3, 3]]]
    values = result.gamma_inverse.values
    assert len(values) == 4
    assert np.all(np.diff(values) >= -1e-6 * values[:-1])
    assert "lsi_tensorization" not in reports


def test_lsi_scaling_tensorizes_at_infinite_temperature():
    (result,) = lsi_scaling(2, [(1, 2), (2, 2), (2, 3)], beta=0.0, cfg=SMALL_SEARCH)
    values = result.gamma_inverse.values
    single = build_generator(build_geometry(2, 0), BoundaryCondition("free"), 0.0, "heatbath")

    assert np.ptp(values) < 1e-4
    assert np.all(np.abs(values - 1.0 / lsi_constant(single, SMALL_SEARCH).gamma_hat) < 1e-4)
    tensorization = [r for r in result.reports if r.inequality == "lsi_tensorization"]
    assert len(tensorization) == 1
    assert tensorization[0].passed
    assert result.passed


def test_lsi_scaling_rejects_equal_site_counts():
    with pytest.raises(GeometryError, match="share one abscissa"):
        lsi_scaling(2, [(1, 4), (2, 2)], cfg=SMALL_SEARCH)
