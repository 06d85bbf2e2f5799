import numpy as np
import pytest
import sympy

from taillab.series import build_f_table, closed_form_next, large_tau_series, small_tau_series, taylor_coefficients


def test_second_term_leading_coefficient():
    series = small_tau_series(3, 3)
    assert series.leading_power == 4
    assert series.coefficient(4) == sympy.Rational(1, 96)


@pytest.mark.parametrize("m", [3, 4])
def test_small_tau_series_matches_closed_form(m):
    order = 10
    series = small_tau_series(m, m, order=order)
    low = 2 * m - 2
    exact = taylor_coefficients(closed_form_next(m), low + order)
    for k in range(low):
        assert exact[k] == 0
    for k in range(low, low + order):
        c = series.coefficient(k)
        assert isinstance(c, sympy.Rational)
        assert sympy.simplify(exact[k] - c) == 0


def test_numeric_table_matches_small_tau_series():
    table = build_f_table(3, 0.0, rho_max=4.0, j_max=5)
    for f in table[1:]:
        series = small_tau_series(3, f.j, order=30)
        for rho in (0.5, 1.0):
            idx = int(np.argmin(np.abs(f.rho - rho)))
            assert f.values[idx].real == pytest.approx(series(f.rho[idx]).real, rel=1e-5)


def test_large_tau_structure():
    series = large_tau_series(closed_form_next(3), 3, 3)
    assert series.leading_power == 3
    assert series.max_log_power <= 1
    assert series.coefficient(3) == sympy.Rational(1, 12)
    assert series.coefficient(2, 1) == sympy.Rational(-1, 2)


def test_numeric_table_matches_large_tau_series():
    series = large_tau_series(closed_form_next(3), 3, 3)
    f = build_f_table(3, 0.0, rho_max=60.0, j_max=3)[-1]
    idx = int(np.argmin(np.abs(f.rho - 40.0)))
    assert f.values[idx].real == pytest.approx(series(f.rho[idx]).real, rel=1e-6)


def test_general_coupling_in_exact_series():
    unit = small_tau_series(3, 4)
    half = small_tau_series(3, 4, v1=sympy.Rational(1, 2))
    for a, _, c in unit.terms:
        assert half.coefficient(a) == c / 8


def test_invalid_orders():
    with pytest.raises(ValueError):
        small_tau_series(2, 2)
    with pytest.raises(ValueError):
        small_tau_series(3, 1)
