import math

import numpy as np
import pytest

from taillab.core.errors import ConfigError
from taillab.core.grids import uniform_grid
from taillab.frequency import first_picard_term, solve_s
from taillab.frequency.specfun import zero_energy_anchor
from taillab.potentials import Family, PotentialSpec, Side
from taillab.series import (
    STANDARD_RAYS,
    bound_holds,
    build_f_table,
    check_ray,
    dual_samples,
    extract_h_coefficients,
    first_term,
    h_limits,
    j_index,
    ray_grid,
    reconstruct_s,
    reconstruct_s_report,
    recurrence_residual,
    sector_constant,
)


def test_j_index():
    assert [j_index(3, j) for j in (2, 3, 4)] == [2, 3, 4]
    assert [j_index(4, j) for j in (3, 4, 5)] == [3, 5, 7]


def test_first_term_is_exact():
    rho = ray_grid(5.0)
    f = first_term(3, 0.0, rho)
    assert np.array_equal(f.values, (rho**2 / 2).astype(complex))
    assert f.j == 2 and f.power == 2


def test_ray_grid_shape():
    rho = ray_grid(50.0)
    assert rho[0] == 0.0 and rho[-1] == pytest.approx(50.0)
    assert np.all(np.diff(rho) > 0)
    assert np.diff(rho)[0] == pytest.approx(0.01)
    assert ray_grid(2.0)[-1] == pytest.approx(2.0)


def test_rays_near_the_pole_are_rejected():
    for theta in (math.pi, -math.pi / 2, 3 * math.pi / 2):
        with pytest.raises(ValueError):
            check_ray(theta)
    check_ray(2 * math.pi / 3)
    assert sector_constant(2 * math.pi / 3) == pytest.approx(2 / math.sqrt(3))
    assert sector_constant(math.pi / 3) == 1.0
    with pytest.raises(ValueError):
        first_term(2, 0.0, ray_grid(1.0))


@pytest.mark.parametrize("m,theta", [(3, 0.0), (3, math.pi / 3), (3, 2 * math.pi / 3), (4, 0.0)])
def test_recurrence_residual(m, theta):
    rho = uniform_grid(0.0, 10.0, 0.01)
    table = build_f_table(m, theta, j_max=m + 1, rho=rho)
    interior = (rho >= 1.0) & (rho <= 8.0)
    for prev, nxt in zip(table, table[1:]):
        res = recurrence_residual(nxt, prev)
        assert np.max(res[interior]) <= 1e-5


@pytest.mark.parametrize("m", [3, 4])
@pytest.mark.parametrize("theta", STANDARD_RAYS)
def test_factorial_bound_on_standard_rays(m, theta):
    table = build_f_table(m, theta, rho_max=50.0, j_max=m + 5)
    assert [f.j for f in table] == list(range(m - 1, m + 6))
    assert all(bound_holds(f) for f in table)


def test_general_coupling_scales_each_step():
    rho = ray_grid(10.0)
    unit = build_f_table(3, 0.0, j_max=5, rho=rho)
    scaled = build_f_table(3, 0.0, j_max=5, v1=0.5, rho=rho)
    for a, b in zip(unit, scaled):
        assert np.allclose(b.values, 0.5 ** (a.j - 1) * a.values, rtol=1e-12, atol=0)


def test_truncation_bound_dominates(repulsive_m3):
    eps, x = 0.02, 20.0
    report = reconstruct_s_report(repulsive_m3, eps, x)
    assert report.tail_bound < 1e-10
    longer = reconstruct_s_report(repulsive_m3, eps, x, terms=report.terms + 2)
    assert abs(longer.value - report.value) <= report.tail_bound + 1e-14
    short = reconstruct_s_report(repulsive_m3, eps, x, terms=3)
    short_longer = reconstruct_s_report(repulsive_m3, eps, x, terms=5)
    assert short.tail_bound > 0
    assert abs(short_longer.value - short.value) <= short.tail_bound


@pytest.mark.slow
def test_reconstruct_s_matches_jost(repulsive_m3):
    eps, x = 0.02, 20.0
    value = reconstruct_s(repulsive_m3, eps, x)
    sol = solve_s(repulsive_m3, eps, Side.PLUS, np.array([x]))
    assert value == pytest.approx(sol.s[0], rel=1e-2)


def test_zero_frequency_limit(repulsive_m4):
    x = 5.0
    value = reconstruct_s(repulsive_m4, 1e-6, x)
    assert value.real == pytest.approx(zero_energy_anchor(4, 1.0, x) - 1.0, rel=1e-3)
    assert abs(value.imag) < 1e-12


def test_weak_potential_matches_first_picard_term():
    spec = PotentialSpec(family=Family.PURE, m=3, v_plus=1e-4, v_minus=1e-4, x_plus=2.0, x_minus=-2.0)
    eps, x = 0.05, 10.0
    value = reconstruct_s(spec, eps, x)
    t1, _ = first_picard_term(spec, eps, np.array([x]))
    assert value == pytest.approx(t1[0], rel=1e-3)


def test_reconstruct_s_validation(repulsive_m3):
    with pytest.raises(ValueError):
        reconstruct_s(repulsive_m3, 0.2, 20.0)
    with pytest.raises(ValueError):
        reconstruct_s(repulsive_m3, 0.01, 1.0)
    with pytest.raises(ValueError):
        reconstruct_s(repulsive_m3, 0.01j, 20.0)
    spec = PotentialSpec(family=Family.SUM, m=3, sum_terms=((3.0, 1.0), (4.0, 0.5)))
    with pytest.raises(ValueError):
        reconstruct_s(spec, 0.01, 20.0)
    with pytest.raises(ConfigError):
        PotentialSpec(m=2)


def test_dual_samples(repulsive_m3):
    eps = 0.05
    qs = [0.01, 0.05, 0.2]
    samples = dual_samples(repulsive_m3, eps, qs)
    assert [s.q for s in samples] == [complex(q) for q in qs]
    for s in samples:
        assert s.s_hat_value == pytest.approx(s.H_value / (s.q * (s.q + 2 * eps)))
    assert samples[0].H_value == pytest.approx(qs[0] ** 2 / 2, rel=1e-3)
    with pytest.raises(ValueError):
        dual_samples(repulsive_m3, eps, [0.0, 0.1])
    with pytest.raises(ValueError):
        dual_samples(repulsive_m3, eps, [-2 * eps])


def test_h_limits(repulsive_m3, repulsive_m4):
    assert h_limits(repulsive_m3, 100.0) == pytest.approx((1.0, 100.0))
    assert h_limits(repulsive_m4, 100.0)[0] == pytest.approx(-2.0 / 3.0)


def test_extract_h_validation(repulsive_m3):
    with pytest.raises(ValueError):
        extract_h_coefficients(repulsive_m3, 100.0, np.geomspace(1e-6, 1e-3, 5))
    with pytest.raises(ValueError):
        extract_h_coefficients(repulsive_m3, 100.0, np.geomspace(1e-4, 2e-2, 10))


@pytest.mark.slow
@pytest.mark.parametrize("fixture", ["repulsive_m3", "repulsive_m4"])
def test_h1_approaches_its_limit(fixture, request):
    spec = request.getfixturevalue(fixture)
    x = 100.0
    fit = extract_h_coefficients(spec, x)
    assert fit.h1 == pytest.approx(h_limits(spec, x)[0], rel=0.1)
    assert (fit.h3 is None) == (spec.m != 3)


@pytest.mark.slow
def test_h1_is_insensitive_to_the_grid(repulsive_m3):
    x = 100.0
    a = extract_h_coefficients(repulsive_m3, x)
    b = extract_h_coefficients(repulsive_m3, x, np.geomspace(2e-4 / x, 0.08 / x, 12))
    assert b.h1 == pytest.approx(a.h1, rel=0.05)


@pytest.mark.slow
def test_h2_grows_linearly_in_x(repulsive_m3):
    near = extract_h_coefficients(repulsive_m3, 100.0)
    far = extract_h_coefficients(repulsive_m3, 200.0)
    assert far.h2 / near.h2 == pytest.approx(2.0, rel=0.15)
