import math

import numpy as np
import pytest

from isinglab.errors import GeometryError, NegativeFunctionError
from isinglab.lab.gibbs import BoundaryCondition, beta_critical, enumerate_measure
from isinglab.lab.inequalities import (averaged_conditional_entropy, block_side_schedule,
                                       condition_on_grid, conditional_entropy_identity,
                                       conditional_expectation, de_bruijn_check,
                                       entropy_monotonicity, factorization_check,
                                       geometric_partition, jensen_step, projection_check,
                                       schedule_boundedness, second_moment_identity, site_mask,
                                       validate_partition, verify_bodineau_helffer,
                                       verify_efron_stein)
from isinglab.lab.lattice import build_block_grid, build_box, build_geometry
from isinglab.lab.spectral import LsiSearchConfig, build_generator, lsi_constant

BETA_C = beta_critical(2)
PERIODIC = BoundaryCondition("periodic")
FREE = BoundaryCondition("free")


def strip(beta=BETA_C):
    """2×4 torus: six grid sites and two single-site blocks."""
    torus = build_box((2, 4), "torus")
    return enumerate_measure(torus, PERIODIC, beta), build_block_grid(torus, 3.0)


def test_strip_decomposition_layout():
    measure, dec = strip()

    assert dec.q == 2
    assert [b.tolist() for b in dec.blocks] == [[5], [7]]
    assert dec.grid.tolist() == [0, 1, 2, 3, 4, 6]


def test_site_mask_and_conditional_expectation():
    measure, _ = strip()
    f = np.random.default_rng(0).standard_normal(measure.n_states)

    assert site_mask([0, 2]) == 5
    assert np.allclose(conditional_expectation(measure.probs, 0, f), measure.expect(f))
    full = (1 << measure.n_sites) - 1
    assert np.allclose(conditional_expectation(measure.probs, full, f), f)


def test_bodineau_helffer_constant_and_zero():
    b = build_generator(build_box((2, 2), "torus"), PERIODIC, BETA_C, "heatbath")

    for F in (np.ones(b.n_states), np.zeros(b.n_states)):
        reports = verify_bodineau_helffer(b, 0.5, F)
        assert [r.inequality for r in reports] == ["bodineau_helffer", "bodineau_helffer_entropy"]
        assert all(r.passed for r in reports)
        assert reports[0].lhs == 0.0


def test_bodineau_helffer_random_functions():
    b = build_generator(build_box((2, 2), "torus"), PERIODIC, BETA_C, "heatbath")
    gamma = lsi_constant(b, LsiSearchConfig(restarts=2, random_candidates=500, max_rounds=3))
    rng = np.random.default_rng(1)

    for _ in range(100):
        F = rng.lognormal(0.0, 1.0, size=b.n_states)
        assert all(r.passed for r in verify_bodineau_helffer(b, gamma.gamma_hat, F))


def test_bodineau_helffer_exponential_on_free_cube():
    cube = build_geometry(2, 1)
    b = build_generator(cube, FREE, BETA_C, "heatbath")
    F = np.exp(0.3 * b.measure.site(cube.origin))
    reports = verify_bodineau_helffer(b, 0.1, F)

    assert all(r.passed for r in reports)
    assert reports[0].lhs > 0


def test_bodineau_helffer_rejects_bad_input():
    b = build_generator(build_box((2, 2), "torus"), PERIODIC, BETA_C, "heatbath")
    with pytest.raises(NegativeFunctionError):
        verify_bodineau_helffer(b, 1.0, -np.ones(b.n_states))
    with pytest.raises(ValueError):
        verify_bodineau_helffer(b, 0.0, np.ones(b.n_states))


def test_efron_stein_additive_is_equality():
    measure, dec = strip()
    F = measure.site(5) + 2.0 * measure.site(7)

    for omega in (None, np.ones(6), np.array([1, -1, 1, -1, -1, 1])):
        report = verify_efron_stein(measure, dec, omega, F)
        assert report.passed
        assert abs(report.lhs - report.rhs) < 1e-12


def test_efron_stein_product_is_strict():
    measure, dec = strip()
    report = verify_efron_stein(measure, dec, None, measure.site(5) * measure.site(7))

    assert report.passed
    assert report.lhs < report.rhs - 1e-6
    assert len(report.details["per_block"]) == 2


def test_efron_stein_grid_function_has_zero_lhs():
    measure, dec = strip()
    report = verify_efron_stein(measure, dec, None, measure.site(0) * measure.site(3))

    assert abs(report.lhs) < 1e-14
    assert report.passed


def test_efron_stein_needs_torus():
    cube = build_geometry(2, 1)
    _, dec = strip()
    with pytest.raises(GeometryError):
        verify_efron_stein(enumerate_measure(cube, FREE, BETA_C), dec, None, np.ones(512))


def test_conditional_entropy_at_infinite_temperature():
    measure, dec = strip(beta=0.0)
    identity, envelope = conditional_entropy_identity(measure, dec)

    assert abs(identity.lhs - 6 * math.log(2)) < 1e-12
    assert identity.passed
    assert envelope.passed


def test_conditional_entropy_identity_critical():
    measure, dec = strip()
    for omega in (None, np.array([-1, 1, 1, -1, 1, -1])):
        identity, envelope = conditional_entropy_identity(measure, dec, omega)
        assert identity.kind == "identity"
        assert identity.passed
        assert identity.lhs > 0
        assert envelope.passed

    torus = build_geometry(2, 1, "torus")
    single = conditional_entropy_identity(
        enumerate_measure(torus, PERIODIC, BETA_C), build_block_grid(torus, 3.0)
    )
    assert abs(single[0].lhs - single[0].rhs) < 1e-10


def test_averaged_conditional_entropy_within_envelope():
    measure, dec = strip()
    report = averaged_conditional_entropy(measure, dec)

    assert report.passed
    assert report.details["nonnegative"]


def test_projection_and_factorization():
    measure, dec = strip()

    assert all(r.passed for r in projection_check(measure, dec, samples=8, seed=2))
    assert factorization_check(measure, dec).passed
    assert factorization_check(measure, dec, np.array([1, 1, -1, -1, 1, 1])).passed


def test_condition_on_grid_checks_omega():
    measure, dec = strip()
    cond = condition_on_grid(measure, dec)

    assert abs(cond.probs.sum() - 1.0) < 1e-12
    assert 0 < cond.grid_probability < 1
    with pytest.raises(ValueError):
        condition_on_grid(measure, dec, np.ones(5))
    with pytest.raises(ValueError):
        condition_on_grid(measure, dec, np.zeros(6))


def test_jensen_step_holds():
    torus = build_box((2, 4), "torus")
    b = build_generator(torus, PERIODIC, BETA_C, "heatbath")
    dec = build_block_grid(torus, 3.0)

    for t in (0.0, 1.0, 3.0):
        report = jensen_step(b, dec, t)
        assert report.passed
        assert report.details == {}


def test_second_moment_identity():
    b = build_generator(build_box((2, 2), "torus"), PERIODIC, BETA_C, "heatbath")
    grid = np.concatenate([[0.0], np.geomspace(0.01, 50.0, 49)])
    identity, translation = second_moment_identity(b, grid)

    assert identity.passed
    assert identity.lhs < 1e-10
    assert translation.passed
    curve = identity.details["curve"]
    assert abs(curve[0] - 1.0) < 1e-12
    assert second_moment_identity(b, [500.0])[0].details["curve"][0] < 1e-8


def test_second_moment_needs_torus():
    b = build_generator(build_geometry(2, 1), FREE, BETA_C, "heatbath")
    with pytest.raises(GeometryError):
        second_moment_identity(b, [1.0])


def test_entropy_decay_and_de_bruijn():
    b = build_generator(build_box((2, 2), "torus"), PERIODIC, BETA_C, "metropolis")
    F = np.random.default_rng(3).lognormal(size=b.n_states)
    grid = [0.0, 0.5, 1.0, 2.0]

    assert entropy_monotonicity(b, F, grid).passed
    assert de_bruijn_check(b, F, grid).passed
    with pytest.raises(NegativeFunctionError):
        de_bruijn_check(b, -F, grid)
    with pytest.raises(ValueError):
        de_bruijn_check(b, F, [])


def test_block_side_schedule_values():
    partition = [1.0, 3.0, 8.0, 20.0]

    assert abs(block_side_schedule(8.0, partition, eta=1, c1=1, alpha=1) - 2.0) < 1e-15
    late = block_side_schedule(19.9, partition, 1, 1, 1)
    assert late == block_side_schedule(8.0, partition, 1, 1, 1)
    with pytest.raises(ValueError):
        block_side_schedule(0.5, partition, 1, 1, 1)


def test_partition_validation():
    assert geometric_partition(4).tolist() == [1.0, 3.0, 9.0, 27.0]
    assert validate_partition([1, 3, 7]).tolist() == [1.0, 3.0, 7.0]
    for bad in ([], [2.0, 5.0], [1.0, 2.0]):
        with pytest.raises(ValueError):
            validate_partition(bad)
    with pytest.raises(ValueError):
        geometric_partition(3, ratio=2.0)


def test_schedule_boundedness():
    report = schedule_boundedness(geometric_partition(6), eta=2.0, c1=1.0, delta=1.0)

    assert report.passed
    assert report.details["monotone"]
    assert report.details["finite"]
    assert abs(report.rhs - (1.25**0.25) * 3**0.25) < 1e-12
