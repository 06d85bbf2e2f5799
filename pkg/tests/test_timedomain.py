import numpy as np
import pytest

from taillab.core.errors import ConfigError, NumericFailure
from taillab.core.grids import GridFunction, uniform_grid
from taillab.potentials import free_spec, sample
from taillab.timedomain import (
    Bump,
    Gaussian,
    RandomBumps,
    SimulationConfig,
    Zero,
    contraction_report,
    decay_fit,
    duhamel_solve,
    evolve_levels,
    first_level,
    leapfrog_solve,
    local_exponent,
    plateau_variation,
    random_bump,
    support_radius,
)


def _config(final_time, h, half_width, recorders=(0.0,), courant=0.5, **kwargs):
    return SimulationConfig(
        half_width=half_width, h=h, k=courant * h, final_time=final_time, recorders=recorders, **kwargs
    )


def test_initial_profiles():
    bump = Bump(0.0, 1.5, 2.0)
    assert bump(0.0) == pytest.approx(2.0)
    assert bump(1.5) == 0.0 and bump(-2.0) == 0.0
    assert np.all(bump(np.linspace(-1.4, 1.4, 9)) > 0)
    gauss = Gaussian(0.0, 0.5)
    assert gauss.support == (-4.0, 4.0)
    assert gauss(4.1) == 0.0
    assert Zero()(1.0) == 0.0
    assert support_radius(Bump(1.0, 0.5)) == pytest.approx(1.5)


def test_random_bumps_are_seeded():
    x = np.linspace(-3.0, 3.0, 601)
    a, b, c = RandomBumps(3), RandomBumps(3), RandomBumps(4)
    assert np.array_equal(a(x), b(x))
    assert not np.array_equal(a(x), c(x))
    values = a(x)
    assert np.all(values >= 0) and np.any(values > 0)
    assert np.all(values[np.abs(x) >= 2.0] == 0.0)
    f = random_bump(uniform_grid(-3.0, 3.0, 0.01), seed=1)
    assert isinstance(f, GridFunction)
    lo, hi = f.support
    assert -2.0 <= lo and hi <= 2.0


def test_config_validation():
    with pytest.raises(ConfigError):
        SimulationConfig(half_width=10.0, h=0.01, k=0.01, final_time=1.0)
    with pytest.raises(ConfigError):
        SimulationConfig(half_width=10.0, h=0.01, k=0.005, final_time=1.0, recorders=(12.0,))
    config = _config(5.0, 0.01, 5.0)
    with pytest.raises(ConfigError):
        leapfrog_solve(free_spec(3), Bump(0.0, 1.0), Zero(), config)


def test_free_evolution_is_dalembert():
    bump = Bump(0.0, 3.0, 1.0)
    recorders = (0.0, 2.0, 6.0)
    result = leapfrog_solve(free_spec(3), bump, Zero(), _config(5.0, 0.01, 9.0, recorders))
    for x in recorders:
        expected = 0.5 * (bump(x - 5.0) + bump(x + 5.0))
        assert result.value_at(x, 5.0) == pytest.approx(expected, abs=1e-4)
    with pytest.raises(KeyError):
        result.trace(1.0)


def test_second_order_convergence(repulsive_m3):
    gauss = Gaussian(0.0, 0.5)

    def value(h):
        return leapfrog_solve(repulsive_m3, gauss, Zero(), _config(3.0, h, 8.0)).value_at(0.0, 3.0)

    reference = value(0.005)
    coarse = abs(value(0.04) - reference)
    fine = abs(value(0.02) - reference)
    assert 3.0 <= coarse / fine <= 5.0


def test_energy_is_conserved(repulsive_m3):
    assert np.all(sample(repulsive_m3, uniform_grid(-50.0, 50.0, 0.5)) >= 0)
    result = leapfrog_solve(repulsive_m3, Gaussian(0.0, 1.0), Zero(), _config(100.0, 0.05, 110.0))
    assert result.energy.size > 10
    assert result.energy_drift() <= 1e-4


def test_time_reversal(repulsive_m3):
    h, k, steps = 0.02, 0.01, 400
    grid = uniform_grid(-20.0, 20.0, h)
    potential = sample(repulsive_m3, grid)
    u0 = np.asarray(Gaussian(0.0, 0.5)(grid))
    start = first_level(u0, np.zeros_like(u0), potential, h, k)
    end_prev, end_now = evolve_levels(u0, start, potential, h, k, steps)
    back_prev, back_now = evolve_levels(end_now, end_prev, potential, h, k, steps)
    assert np.max(np.abs(back_now - u0)) <= 1e-6
    assert np.max(np.abs(back_prev - start)) <= 1e-6


def test_light_cone(repulsive_m3):
    h, t = 0.01, 5.0
    result = leapfrog_solve(repulsive_m3, Zero(), Bump(0.0, 1.0), _config(t, h, 8.0))
    # the scheme's dispersive front trails the cone over a width ~ (t h^2)^(1/3)
    outside = np.abs(result.grid) > 1.0 + t + 50 * h
    assert np.max(np.abs(result.final[1][outside])) <= 1e-12


def test_stencil_reach_is_exact(repulsive_m3):
    h = 0.01
    config = _config(0.5, h, 4.0)
    result = leapfrog_solve(repulsive_m3, Zero(), Bump(0.0, 1.0), config)
    outside = np.abs(result.grid) > 1.0 + config.steps * h + 2 * h
    assert np.any(outside)
    assert np.all(result.final[1][outside] == 0.0)


def test_duhamel_free_space_is_one_iteration():
    bump = Bump(0.0, 1.0)
    result = duhamel_solve(free_spec(3), bump, Zero(), 2.0, h=0.05, support=1.0)
    assert result.iterations == 1
    assert result.value_at(0.5, 1.0) == pytest.approx(0.5 * bump(-0.5), abs=1e-12)


def test_duhamel_contraction(repulsive_m3):
    result = duhamel_solve(repulsive_m3, Bump(0.0, 1.5), Zero(), 5.0, h=0.05)
    report = contraction_report(result)
    assert result.iterations > 1
    assert len(report.ratios) >= 2
    assert report.bound < 1.0
    assert report.ok


@pytest.mark.slow
def test_duhamel_matches_leapfrog(repulsive_m3):
    bump = Bump(0.0, 1.5)
    duhamel = duhamel_solve(repulsive_m3, bump, Zero(), 10.0, h=0.02)
    oracle = leapfrog_solve(repulsive_m3, bump, Zero(), _config(10.0, 0.01, 13.0))
    for t in (2.0, 5.0, 10.0):
        assert duhamel.value_at(0.0, t) == pytest.approx(oracle.value_at(0.0, t), abs=1e-3)


def test_decay_fit_exact_power_law():
    t = np.linspace(1.0, 1000.0, 4000)
    report = decay_fit(t, 7.0 * t**-3.0)
    assert report.exponent == pytest.approx(3.0, abs=1e-6)
    assert report.amplitude == pytest.approx(7.0, rel=1e-9)
    assert report.window == (125.0, 500.0)
    assert np.allclose(report.local_exponent, 3.0, atol=1e-8)
    assert plateau_variation(t, 7.0 * t**-3.0, 3, (200.0, 400.0)) == pytest.approx(0.0, abs=1e-12)


def test_decay_fit_with_correction():
    t = np.linspace(1.0, 1000.0, 10000)
    psi = t**-3.0 * (1.0 + 5.0 / t)
    early = decay_fit(t, psi, (50.0, 500.0))
    late = decay_fit(t, psi, (100.0, 1000.0))
    assert 3.0 <= early.exponent <= 3.1
    assert 3.0 <= late.exponent < early.exponent


def test_decay_fit_errors():
    t = np.linspace(1.0, 100.0, 1000)
    with pytest.raises(NumericFailure):
        decay_fit(t, np.cos(t) * t**-3.0, (10.0, 50.0))
    with pytest.raises(ValueError):
        decay_fit(t, t**-3.0, (10.0, 500.0))
    with pytest.raises(ValueError):
        decay_fit(t, np.zeros_like(t), (10.0, 50.0))
    lt, lp = local_exponent(t, t**-2.0)
    assert lt.size == t.size and np.allclose(lp, 2.0, atol=1e-8)
