import numpy as np
import pytest

from taillab.core.errors import ConfigError
from taillab.potentials import (
    Family,
    PotentialSpec,
    Side,
    build_potential,
    derivative,
    envelope_constant,
    evaluate,
    expected_exponents,
    get_family,
    list_families,
    sup_norm,
)
from taillab.potentials.bridge import smoothstep


def test_pure_tail_values(repulsive_m3):
    assert evaluate(repulsive_m3, 10.0) == pytest.approx(1e-3, rel=1e-14)
    assert evaluate(repulsive_m3, -10.0) == pytest.approx(1e-3, rel=1e-14)
    assert evaluate(repulsive_m3, 2.0) == pytest.approx(2.0**-3, rel=1e-14)


def test_tail_is_exact_on_grid(repulsive_m3):
    grid = np.linspace(2.0, 60.0, 500)
    assert np.allclose(evaluate(repulsive_m3, grid), grid**-3.0, rtol=1e-14, atol=0.0)


def test_first_derivative_in_tail(repulsive_m3):
    assert derivative(repulsive_m3, 10.0, 1) == pytest.approx(-3e-4, rel=1e-12)
    assert derivative(repulsive_m3, 7.0, 0) == evaluate(repulsive_m3, 7.0)


def test_second_derivative_matches_finite_difference(repulsive_m3):
    h = 1e-3
    fd = (evaluate(repulsive_m3, 20.0 + h) - 2 * evaluate(repulsive_m3, 20.0) + evaluate(repulsive_m3, 20.0 - h)) / h**2
    assert derivative(repulsive_m3, 20.0, 2) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("m", [3, 4])
def test_derivatives_continuous_at_cutoffs(m):
    spec = PotentialSpec(m=m, v_plus=1.0, v_minus=-0.5, x_plus=2.0, x_minus=-3.0)
    delta = 1e-11
    for cutoff in (spec.x_plus, spec.x_minus, spec.x_plus / 2, spec.x_minus / 2):
        for k in range(spec.smoothness + 1):
            left = derivative(spec, cutoff - delta, k)
            right = derivative(spec, cutoff + delta, k)
            scale = max(1.0, abs(left), abs(right))
            assert abs(left - right) <= 1e-4 * scale, (cutoff, k)


@pytest.mark.parametrize("m", [3, 4])
def test_derivative_chain_matches_finite_differences(m):
    spec = PotentialSpec(m=m, v_plus=1.0, v_minus=2.0, x_plus=2.0, x_minus=-2.0, well_depth=0.5, well_halfwidth=1.0)
    tail = np.concatenate([np.linspace(-50.0, -2.5, 60), np.linspace(2.5, 50.0, 60)])
    middle = np.concatenate([np.linspace(-1.95, -0.05, 60), np.linspace(0.05, 1.95, 60)])
    for k in range(1, spec.smoothness + 1):
        step = 1e-4
        exact = derivative(spec, tail, k)
        fd = (derivative(spec, tail + step, k - 1) - derivative(spec, tail - step, k - 1)) / (2 * step)
        assert np.allclose(fd, exact, rtol=1e-5, atol=0.0), k

        step = 1e-5
        exact = derivative(spec, middle, k)
        fd = (derivative(spec, middle + step, k - 1) - derivative(spec, middle - step, k - 1)) / (2 * step)
        assert np.max(np.abs(fd - exact)) <= 1e-4 * np.max(np.abs(exact)), k


def test_derivative_order_out_of_range(repulsive_m3):
    with pytest.raises(ValueError):
        derivative(repulsive_m3, 1.0, repulsive_m3.m + 3)
    with pytest.raises(ValueError):
        derivative(repulsive_m3, 1.0, -1)


def test_smoothstep_endpoints():
    poly = smoothstep(5)
    assert poly(0.0) == pytest.approx(0.0, abs=1e-14)
    assert poly(1.0) == pytest.approx(1.0, abs=1e-12)
    for k in range(1, 6):
        assert poly.deriv(k)(0.0) == pytest.approx(0.0, abs=1e-10)
        assert poly.deriv(k)(1.0) == pytest.approx(0.0, abs=1e-8)


def test_sum_family_tail():
    spec = PotentialSpec(family=Family.SUM, m=3, sum_terms=((3.0, 1.0), (4.5, -0.3)), x_plus=2.0, x_minus=-2.0)
    for x in (5.0, -5.0, 12.0):
        r = abs(x)
        assert evaluate(spec, x) == pytest.approx(r**-3.0 - 0.3 * r**-4.5, rel=1e-13)
    assert expected_exponents(spec) == (3.0, 4.0)


def test_correction_family_needs_gap():
    with pytest.raises(ConfigError):
        PotentialSpec(family=Family.CORRECTION, m=3, correction_exponent=6.0, correction_coefficient=1.0)
    spec = PotentialSpec(family=Family.CORRECTION, m=3, correction_exponent=6.5, correction_coefficient=2.0)
    assert evaluate(spec, 4.0) == pytest.approx(4.0**-3 + 2.0 * 4.0**-6.5, rel=1e-13)
    assert [t.exponent for t in spec.tail_terms(Side.PLUS)] == [3.0, 6.5]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"m": 2},
        {"m": 3.5},
        {"x_plus": 0.5},
        {"x_minus": -0.5},
        {"well_depth": -1.0, "well_halfwidth": 3.0},
        {"family": Family.SUM, "sum_terms": ((2.0, 1.0),)},
    ],
)
def test_invalid_specs_rejected(kwargs):
    with pytest.raises(ConfigError):
        PotentialSpec(**kwargs)


def test_reflected_swaps_sides():
    spec = PotentialSpec(m=3, v_plus=1.0, v_minus=-2.0, x_plus=2.0, x_minus=-3.0)
    mirror = spec.reflected()
    xs = np.linspace(-10.0, 10.0, 41)
    assert np.allclose(evaluate(mirror, xs), evaluate(spec, -xs), rtol=1e-14, atol=1e-16)


def test_well_and_norms(deep_well):
    assert evaluate(deep_well, 0.0) == pytest.approx(-10.0)
    assert sup_norm(deep_well) == pytest.approx(10.0, rel=1e-9)
    grid = np.linspace(-40.0, 40.0, 2001)
    for k in range(3):
        assert np.isfinite(envelope_constant(deep_well, k, grid))


def test_registry_builds_from_config_values():
    assert [f.name for f in list_families()] == ["pure", "sum", "correction"]
    assert get_family("missing") is None
    spec = build_potential({"family": "sum", "m": "3", "sum_terms": "3:1.0, 5:0.5"})
    assert spec.sum_terms == ((3.0, 1.0), (5.0, 0.5))
    with pytest.raises(ConfigError):
        build_potential({"family": "pure", "bogus": "1"})
    with pytest.raises(ConfigError):
        build_potential({"family": "yukawa"})
