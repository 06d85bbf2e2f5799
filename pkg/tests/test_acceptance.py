"""Desk-scale runs of the decay laws against the leapfrog oracle."""

import numpy as np
import pytest

from taillab.core.grids import uniform_grid
from taillab.core.workers import map_ordered
from taillab.ilt import reconstruct_time_solution
from taillab.potentials import Family, PotentialSpec, expected_exponents
from taillab.timedomain import (
    Bump,
    RandomBumps,
    SimulationConfig,
    Zero,
    decay_fit,
    leapfrog_solve,
    plateau_variation,
)

pytestmark = pytest.mark.slow

LONG = SimulationConfig(half_width=600.0, h=0.05, k=0.025, final_time=400.0, recorders=(0.0,), energy_every=400)


def _repulsive(m):
    return PotentialSpec(family=Family.PURE, m=m, v_plus=1.0, v_minus=1.0, x_plus=2.0, x_minus=-2.0)


def _series(result):
    # t = 0 has no logarithm
    return result.times[1:], result.trace(0.0)[1:]


@pytest.fixture(scope="module")
def sine_m3():
    return leapfrog_solve(_repulsive(3), Zero(), RandomBumps(seed=7), LONG)


def test_sine_decay_m3(sine_m3):
    t, psi = _series(sine_m3)
    report = decay_fit(t, psi, (50.0, 400.0))
    assert 2.8 <= report.exponent <= 3.2
    assert report.exponent == pytest.approx(expected_exponents(_repulsive(3))[0], abs=0.2)


def test_sine_decay_m4():
    result = leapfrog_solve(_repulsive(4), Zero(), RandomBumps(seed=7), LONG)
    t, psi = _series(result)
    assert 3.75 <= decay_fit(t, psi, (50.0, 400.0)).exponent <= 4.25


def test_cosine_decay_m3():
    result = leapfrog_solve(_repulsive(3), Bump(0.0, 1.5), Zero(), LONG)
    t, psi = _series(result)
    assert 3.7 <= decay_fit(t, psi, (50.0, 400.0)).exponent <= 4.3


def test_amplitude_plateau(sine_m3):
    t, psi = _series(sine_m3)
    assert plateau_variation(t, psi, 3, (200.0, 400.0)) <= 0.15


def test_energy_is_conserved_on_long_run(sine_m3):
    assert sine_m3.energy_drift() <= 1e-4


def test_amplitude_is_generic():
    config = SimulationConfig(half_width=210.0, h=0.05, k=0.025, final_time=200.0)

    def amplitude(seed):
        t, psi = _series(leapfrog_solve(_repulsive(3), Zero(), RandomBumps(seed=seed), config))
        return decay_fit(t, psi, (50.0, 200.0), amplitude_window=(100.0, 200.0)).amplitude

    amplitudes = np.array(map_ordered(amplitude, range(5)))
    assert np.all(np.abs(amplitudes) > 1e-4)
    assert np.all(np.sign(amplitudes) == np.sign(amplitudes[0]))


def test_inverse_laplace_matches_oracle():
    spec = _repulsive(3)
    bump = Bump(0.0, 1.5)
    ts = (5.0, 10.0, 20.0)
    grid = uniform_grid(-3.0, 3.0, 0.01)
    psi0, psi1 = Zero().sample(grid), bump.sample(grid)
    reconstructed = reconstruct_time_solution(spec, psi0, psi1, 0.0, ts)

    config = SimulationConfig(half_width=23.5, h=0.01, k=0.005, final_time=20.0)
    oracle = leapfrog_solve(spec, Zero(), bump, config)
    peak = float(np.max(np.abs(oracle.trace(0.0))))
    for t, value in zip(ts, reconstructed):
        assert abs(value - oracle.value_at(0.0, t)) <= 1e-3 * peak


def test_reconstructed_tail_has_cubic_plateau():
    grid = uniform_grid(-3.0, 3.0, 0.01)
    psi0, psi1 = Zero().sample(grid), Bump(0.0, 1.5).sample(grid)
    ts = np.linspace(100.0, 200.0, 11)
    values = reconstruct_time_solution(_repulsive(3), psi0, psi1, 0.0, ts)
    assert np.all(np.sign(values) == np.sign(values[0]))
    assert plateau_variation(ts, values, 3, (100.0, 200.0)) <= 0.10
