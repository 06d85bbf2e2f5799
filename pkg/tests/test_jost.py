import numpy as np
import pytest
from scipy.integrate import quad, trapezoid

from taillab.core.errors import NumericFailure
from taillab.core.grids import bracket, uniform_grid
from taillab.frequency import (
    Frequency,
    JostSettings,
    epsilon_derivative_bound,
    extend_to_line,
    first_picard_term,
    jost_pair,
    residual,
    solve_s,
    wronskian,
    wronskian_profile,
    wronskian_value,
)
from taillab.frequency.wronskian import cauchy_mean, q3_profile
from taillab.potentials import PotentialSpec, Side, evaluate


def test_frequency_validation():
    with pytest.raises(ValueError):
        Frequency(0.0)
    with pytest.raises(ValueError):
        Frequency(-0.1 + 1j)
    imaginary = Frequency(2j)
    assert imaginary.value == 2j
    assert Frequency.of(imaginary) is imaginary
    assert Frequency(1j).log() == pytest.approx(0.5j * np.pi)


def test_free_space_is_exact(free_potential):
    grid = uniform_grid(-5.0, 5.0, 0.05)
    eps = 0.4 + 0.3j
    sol = solve_s(free_potential, eps, Side.PLUS, grid)
    assert sol.diagnostics.iterations == 1
    assert np.all(sol.s == 0)
    assert np.allclose(sol.y, np.exp(-eps * grid), rtol=1e-14, atol=0)
    minus = solve_s(free_potential, eps, Side.MINUS, grid)
    assert np.allclose(minus.y, np.exp(eps * grid), rtol=1e-14, atol=0)
    assert wronskian(sol, minus) == pytest.approx(2 * eps, abs=1e-13)
    assert wronskian_value(free_potential, eps) == pytest.approx(2 * eps, abs=1e-13)


def test_first_picard_term_matches_quadrature(repulsive_m3):
    eps = 1.0
    s, ds = first_picard_term(repulsive_m3, eps, np.array([5.0]))
    flux, _ = quad(lambda u: np.exp(-2 * eps * (u - 5.0)) * u**-3.0, 5.0, np.inf)
    assert ds[0].real == pytest.approx(-flux, rel=1e-10)
    direct, _ = quad(
        lambda t: quad(lambda u: np.exp(-2 * eps * (u - t)) * u**-3.0, t, np.inf)[0], 5.0, np.inf, limit=200
    )
    assert s[0].real == pytest.approx(direct, rel=1e-7)


def test_weak_potential_follows_first_picard_term():
    spec = PotentialSpec(m=3, v_plus=1e-6, v_minus=1e-6)
    grid = uniform_grid(2.0, 30.0, 0.02)
    eps = 0.3 + 0.2j
    sol = solve_s(spec, eps, Side.PLUS, grid)
    t1, _ = first_picard_term(spec, eps, grid[::200])
    assert np.allclose(sol.s[::200], t1, rtol=1e-5, atol=0)


@pytest.mark.parametrize("eps", [1e-3, 1e-2, 0.1, 1.0, 10.0, 0.5 + 2j])
def test_decay_bound_shape(repulsive_m3, eps):
    grid = uniform_grid(2.0, 40.0, 0.02)
    sol = solve_s(repulsive_m3, eps, Side.PLUS, grid)
    bx = bracket(grid)
    scaled = np.abs(sol.s) * (abs(eps) * bx + 1.0) * bx
    measured = scaled[-1]
    assert scaled[np.searchsorted(grid, 20.0)] <= 1.5 * measured
    assert np.max(scaled) <= 10 * measured


@pytest.mark.parametrize("eps", [0.5 + 0.3j, 2.0, 0.1j + 0.05])
def test_line_residual(repulsive_m3, eps):
    grid = uniform_grid(-12.0, 12.0, 0.01)
    y_plus, y_minus = jost_pair(repulsive_m3, eps, grid)
    assert np.max(residual(y_plus, repulsive_m3)) <= 1e-7
    assert np.max(residual(y_minus, repulsive_m3)) <= 1e-7


def test_extension_keeps_tail_values(repulsive_m3):
    grid = uniform_grid(-6.0, 20.0, 0.02)
    tail_grid = grid[grid >= repulsive_m3.x_plus - 1e-12]
    tail = solve_s(repulsive_m3, 0.5 + 0.3j, Side.PLUS, tail_grid)
    full = extend_to_line(tail, repulsive_m3, grid)
    n = tail_grid.size
    assert np.array_equal(full.a[-n:], tail.a)
    assert np.array_equal(full.a_prime[-n:], tail.a_prime)
    assert full.diagnostics.extended
    with pytest.raises(ValueError):
        extend_to_line(tail, repulsive_m3, grid[:-5])


@pytest.mark.parametrize("eps", [0.7, 0.5 + 0.3j, 3.0 - 1.0j])
def test_wronskian_constant_in_x(repulsive_m3, eps):
    grid = uniform_grid(-10.0, 10.0, 0.02)
    profile = wronskian_profile(*jost_pair(repulsive_m3, eps, grid))
    assert np.std(np.abs(profile)) / np.abs(np.mean(profile)) <= 1e-6


def test_q3_stays_bounded(repulsive_m3):
    xs = np.linspace(-2000.0, 2000.0, 400001)
    mass = trapezoid(np.abs(evaluate(repulsive_m3, xs)), xs)
    q3 = q3_profile(repulsive_m3, [2.0, 4.0, 8.0, 16.0])
    assert np.all(np.abs(q3) <= 2.0 * mass)


def test_conjugate_symmetry(repulsive_m3):
    grid = uniform_grid(-8.0, 8.0, 0.02)
    eps = 0.6 + 0.8j
    a = solve_s(repulsive_m3, eps, Side.PLUS, grid)
    b = solve_s(repulsive_m3, np.conj(eps), Side.PLUS, grid)
    assert np.allclose(b.y, np.conj(a.y), rtol=1e-10, atol=1e-12 * np.max(np.abs(a.y)))


def test_wronskian_cauchy_mean(repulsive_m3):
    center = 1.0 + 0.5j
    assert cauchy_mean(repulsive_m3, center, 0.1) == pytest.approx(wronskian_value(repulsive_m3, center), rel=1e-6)


def test_small_eps_anchor_diagnostic(repulsive_m3):
    grid = uniform_grid(2.0, 20.0, 0.02)
    sol = solve_s(repulsive_m3, 1e-5, Side.PLUS, grid)
    assert sol.diagnostics.anchor_deviation is not None
    assert not sol.diagnostics.anchor_flagged
    assert sol.diagnostics.x_infinity >= 50 * repulsive_m3.x_plus


def test_picard_limit_raises(repulsive_m3):
    grid = uniform_grid(2.0, 10.0, 0.05)
    with pytest.raises(NumericFailure):
        solve_s(repulsive_m3, 0.5, Side.PLUS, grid, settings=JostSettings(max_iter=1))


def test_grid_must_reach_tail(repulsive_m3):
    with pytest.raises(ValueError):
        solve_s(repulsive_m3, 0.5, Side.PLUS, uniform_grid(-5.0, 1.0, 0.1))


def test_nonuniform_tail_grid(repulsive_m3):
    eps = 0.4 + 0.1j
    coarse = np.array([2.0, 2.5, 3.7, 6.0, 11.0])
    fine = uniform_grid(2.0, 11.0, 0.01)
    a = solve_s(repulsive_m3, eps, Side.PLUS, coarse)
    b = solve_s(repulsive_m3, eps, Side.PLUS, fine)
    idx = [int(round((x - 2.0) / 0.01)) for x in coarse]
    assert np.allclose(a.s, b.s[idx], rtol=1e-6, atol=1e-12)
    assert np.allclose(a.s_prime, b.s_prime[idx], rtol=1e-5, atol=1e-12)


def test_epsilon_derivative_estimate(repulsive_m3):
    first = epsilon_derivative_bound(repulsive_m3, 0.5, 10.0, 1)
    second = epsilon_derivative_bound(repulsive_m3, 0.5, 10.0, 2)
    assert np.isfinite(first.scaled) and first.scaled > 0
    assert np.isfinite(second.scaled)
    with pytest.raises(ValueError):
        epsilon_derivative_bound(repulsive_m3, 0.5, 10.0, 3)
