import math

import numpy as np
import pytest

from isinglab.lab.gibbs import BoundaryCondition, beta_critical, encode, enumerate_measure
from isinglab.lab.glauber import (RateFamily, RateRegistry, coupled_pair, energy_flux,
                                  local_fields, make_rate_model, rate, rate_table,
                                  read_event_log, register, replay, simulate_ct,
                                  simulate_overlap, verify_rate_axioms, write_event_log)
from isinglab.lab.lattice import build_box, build_geometry
from isinglab.lab.rng import stream

BETA_C = beta_critical(2)
PLUS = BoundaryCondition("plus")
FREE = BoundaryCondition("free")
PERIODIC = BoundaryCondition("periodic")


def test_heatbath_zero_field_is_one_half():
    torus = build_box((2, 2), "torus")
    model = make_rate_model("heatbath", BETA_C, 2)
    sigma = np.array([1, 1, -1, -1])

    assert local_fields(torus, PERIODIC, sigma)[0] == 0
    assert abs(rate(model, torus, PERIODIC, sigma, 0) - 0.5) < 1e-15


def test_metropolis_values():
    cube = build_geometry(2, 1)
    model = make_rate_model("metropolis", BETA_C, 2)
    centre = cube.origin
    sigma = np.ones(cube.n_sites, dtype=np.int8)

    assert abs(rate(model, cube, FREE, sigma, centre) - math.exp(-8 * BETA_C)) < 1e-14
    assert abs(math.exp(-8 * BETA_C) - 0.0295) < 1e-4
    sigma[centre] = -1
    assert rate(model, cube, FREE, sigma, centre) == 1.0


def test_rate_model_bounds_and_lookup():
    model = make_rate_model("Metropolis", BETA_C, 2)

    assert model.family == "metropolis"
    assert model.max_field == 4
    assert model.c_max == 1.0
    assert abs(model.c_min - math.exp(-8 * BETA_C)) < 1e-15
    assert model(np.array([0]))[0] == 1.0
    assert model.to_dict()["c_M"] == 1.0


def test_make_rate_model_unknown_family():
    with pytest.raises(ValueError):
        make_rate_model("kawasaki", BETA_C, 2)


def test_rate_rejects_bad_site():
    cube = build_geometry(2, 1)
    model = make_rate_model("heatbath", BETA_C, 2)
    with pytest.raises(ValueError):
        rate(model, cube, FREE, np.ones(cube.n_sites), cube.n_sites)


def test_local_fields_include_boundary():
    single = build_geometry(2, 0)
    assert local_fields(single, PLUS, np.array([1]))[0] == 4
    assert local_fields(single, FREE, np.array([1]))[0] == 0

    cube = build_geometry(2, 1)
    stack = np.ones((3, cube.n_sites), dtype=np.int8)
    model = make_rate_model("heatbath", BETA_C, 2)
    assert rate_table(model, cube, PLUS, stack).shape == (3, cube.n_sites)


def test_axioms_heatbath_torus():
    torus = build_box((2, 2), "torus")
    report = verify_rate_axioms(make_rate_model("heatbath", BETA_C, 2), torus, PERIODIC)

    assert report.exhaustive
    assert report.passed
    assert [c.axiom for c in report.checks] == [
        "bounds",
        "detailed_balance",
        "locality",
        "translation",
    ]
    assert report.check("detailed_balance").max_violation <= 1e-12


def test_axioms_metropolis_free_cube_bounds_are_tight():
    cube = build_geometry(2, 1)
    model = make_rate_model("metropolis", BETA_C, 2)
    report = verify_rate_axioms(model, cube, FREE)

    assert report.passed
    assert report.observed_max == 1.0
    assert abs(report.observed_min - math.exp(-8 * BETA_C)) < 1e-15
    assert report.check("translation").detail == "not applicable off the torus"


def test_axioms_sampled_mode_plus_cube():
    cube = build_geometry(2, 2)
    report = verify_rate_axioms(
        make_rate_model("heatbath", BETA_C, 2), cube, PLUS, samples=200, seed=3
    )

    assert not report.exhaustive
    assert report.passed
    assert report.to_dict()["checks"][1]["detail"] == "local energy ratio"


def test_corrupted_rate_fails_detailed_balance():
    @register
    class Constant(RateFamily):
        def evaluate(self, beta, p):
            return np.full(np.shape(p), 0.7)

    try:
        torus = build_box((2, 2), "torus")
        report = verify_rate_axioms(make_rate_model("constant", BETA_C, 2), torus, PERIODIC)
        assert not report.passed
        assert not report.check("detailed_balance").passed
        assert report.check("bounds").passed
        assert report.check("locality").passed
    finally:
        RateRegistry.unregister("constant")


def test_register_rejects_non_family():
    with pytest.raises(TypeError):
        register(object)


def test_zero_horizon_is_empty():
    cube = build_geometry(2, 1)
    model = make_rate_model("heatbath", BETA_C, 2)
    sigma0 = np.ones(cube.n_sites, dtype=np.int8)
    traj = simulate_ct(model, cube, PLUS, sigma0, 0.0, seed=1)

    assert traj.n_events == 0
    assert traj.final.tolist() == sigma0.tolist()
    assert traj.validate()


def test_negative_horizon_rejected():
    cube = build_geometry(2, 1)
    model = make_rate_model("heatbath", BETA_C, 2)
    with pytest.raises(ValueError):
        simulate_ct(model, cube, PLUS, np.ones(cube.n_sites), -1.0)


def test_trajectory_is_deterministic_and_replays():
    torus = build_box((4, 4), "torus")
    model = make_rate_model("metropolis", BETA_C, 2)
    sigma0 = np.ones(torus.n_sites, dtype=np.int8)
    a = simulate_ct(model, torus, PERIODIC, sigma0, 5.0, seed=11, index=2)
    b = simulate_ct(model, torus, PERIODIC, sigma0, 5.0, seed=11, index=2)

    assert a.n_events > 0
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.final, b.final)
    assert a.validate()
    assert np.array_equal(replay(a), a.final)
    assert sum(energy_flux(a, torus, PERIODIC).values()) == a.n_flips


def test_event_log_round_trip(tmp_path):
    cube = build_geometry(2, 1)
    model = make_rate_model("heatbath", BETA_C, 2)
    traj = simulate_ct(model, cube, PLUS, np.ones(cube.n_sites), 3.0, seed=5)
    path = tmp_path / "events.bin"
    write_event_log(path, traj)
    loaded = read_event_log(path)

    assert path.read_bytes()[:4] == b"GLEV"
    assert loaded.horizon == traj.horizon
    assert np.array_equal(loaded.times, traj.times)
    assert np.array_equal(loaded.sites, traj.sites)
    assert np.array_equal(loaded.accepted, traj.accepted)
    assert np.array_equal(loaded.final, traj.final)


def test_event_log_bad_magic(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"XXXX" + bytes(40))
    with pytest.raises(ValueError):
        read_event_log(path)


def test_single_free_spin_flip_rate():
    single = build_geometry(2, 0)
    model = make_rate_model("heatbath", BETA_C, 2)
    T, runs = 4.0, 2000
    flips = np.array(
        [simulate_ct(model, single, FREE, [1], T, seed=0, index=i).n_flips for i in range(runs)]
    )
    stderr = flips.std(ddof=1) / math.sqrt(runs)

    assert abs(flips.mean() - T / 2) < 4 * stderr


def test_uniformization_reaches_stationary_law():
    torus = build_box((2, 2), "torus")
    model = make_rate_model("heatbath", BETA_C, 2)
    probs = enumerate_measure(torus, PERIODIC, BETA_C).probs
    runs = 3000
    counts = np.zeros(16)
    for i in range(runs):
        final = simulate_ct(model, torus, PERIODIC, np.ones(4), 20.0, seed=2, index=i).final
        counts[encode(final)] += 1
    freq = counts / runs
    stderr = np.sqrt(probs * (1 - probs) / runs)

    assert np.all(np.abs(freq - probs) <= 4 * stderr + 1e-3)


def test_infinite_temperature_overlap_decays_exponentially():
    torus = build_box((2, 2), "torus")
    model = make_rate_model("heatbath", 0.0, 2)
    grid = np.array([0.0, 0.5, 1.0, 2.0])
    runs = 2000
    overlaps = np.array(
        [
            simulate_overlap(model, torus, PERIODIC, np.ones(4), grid, stream(0, "glauber", r))
            for r in range(runs)
        ]
    )
    mean = overlaps.mean(axis=0)

    assert mean[0] == 1.0
    assert np.all(np.abs(mean - np.exp(-grid)) < 0.05)


def test_monotone_coupling_preserves_order():
    cube = build_geometry(2, 1)
    model = make_rate_model("heatbath", BETA_C, 2)
    low, high, violations = coupled_pair(
        model, cube, PLUS, -np.ones(cube.n_sites), np.ones(cube.n_sites), 10.0, seed=4
    )

    assert violations == 0
    assert np.all(low <= high)


def test_monotone_coupling_needs_heatbath():
    cube = build_geometry(2, 1)
    metropolis = make_rate_model("metropolis", BETA_C, 2)
    with pytest.raises(ValueError):
        simulate_ct(metropolis, cube, PLUS, np.ones(cube.n_sites), 1.0, coupling="monotone")
    with pytest.raises(ValueError):
        coupled_pair(
            make_rate_model("heatbath", BETA_C, 2),
            cube,
            PLUS,
            np.ones(cube.n_sites),
            -np.ones(cube.n_sites),
            1.0,
        )


def test_unknown_coupling():
    cube = build_geometry(2, 1)
    model = make_rate_model("heatbath", BETA_C, 2)
    with pytest.raises(ValueError):
        simulate_ct(model, cube, PLUS, np.ones(cube.n_sites), 1.0, coupling="gillespie")
