"""Cubic product-integration rules with exact exponential weights."""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import cumulative_trapezoid
from scipy.signal import lfilter

_SERIES_RADIUS = 2.0
_SERIES_TERMS = 40


def exp_moments(z: complex, order: int = 3) -> np.ndarray:
    """mu_j(z) = int_0^1 exp(-z s) s^j ds for j = 0..order."""
    z = complex(z)
    mu = np.empty(order + 1, dtype=complex)
    if abs(z) < _SERIES_RADIUS:
        n = np.arange(_SERIES_TERMS)
        powers = np.array([(-z) ** k / factorial(k) for k in range(_SERIES_TERMS)], dtype=complex)
        for j in range(order + 1):
            mu[j] = np.sum(powers / (n + j + 1))
        return mu
    ez = np.exp(-z)
    mu[0] = (1.0 - ez) / z
    for j in range(1, order + 1):
        mu[j] = (j * mu[j - 1] - ez) / z
    return mu


@lru_cache(maxsize=64)
def _lagrange_monomials(nodes: Tuple[float, ...]) -> np.ndarray:
    """Row k holds the ascending monomial coefficients of the k-th Lagrange basis."""
    rows = []
    for k, xk in enumerate(nodes):
        others = [x for i, x in enumerate(nodes) if i != k]
        coeffs = P.polyfromroots(others) if others else np.array([1.0])
        denom = np.prod([xk - x for x in others]) if others else 1.0
        rows.append(coeffs / denom)
    return np.array(rows)


def _stencil_weights(nodes: Tuple[float, ...], z: complex) -> np.ndarray:
    basis = _lagrange_monomials(nodes)
    mu = exp_moments(z, basis.shape[1] - 1)
    return basis @ mu


def _interval_integrals(values: np.ndarray, h: float, z: complex) -> np.ndarray:
    """A_i = int over [x_i, x_{i+1}] of exp(-z (t - x_i)/h) f(t) dt, cubic interpolation of f."""
    n_int = values.size - 1
    out = np.empty(n_int, dtype=np.result_type(values, complex))
    if n_int < 3:
        for i in range(n_int):
            nodes = tuple(float(k - i) for k in range(n_int + 1))
            w = _stencil_weights(nodes, z)
            out[i] = h * np.dot(w, values)
        return out
    idx = np.arange(n_int)
    start = np.clip(idx - 1, 0, n_int - 3)
    for shift in (0, 1, 2):
        mask = (idx - start) == shift
        if not np.any(mask):
            continue
        nodes = tuple(float(k - shift) for k in range(4))
        w = _stencil_weights(nodes, z)
        s = start[mask]
        acc = w[0] * values[s]
        for k in range(1, 4):
            acc = acc + w[k] * values[s + k]
        out[mask] = h * acc
    return out


def exp_cumulative_right(values: np.ndarray, h: float, lam: complex, tail: complex = 0.0) -> np.ndarray:
    """I_i = int_{x_i}^{x_N} exp(-lam (t - x_i)) f(t) dt + exp(-lam (x_N - x_i)) * tail.

    Uniform grid with step h; Re lam >= 0 keeps the backward recurrence stable.
    """
    values = np.asarray(values)
    if values.size < 2:
        return np.full(values.shape, complex(tail))
    z = complex(lam) * h
    r = np.exp(-z)
    a = _interval_integrals(values, h, z)
    # backward recurrence I_i = A_i + r I_{i+1}, run as a first-order IIR filter on reversed data
    rev, _ = lfilter(np.array([1.0 + 0j]), np.array([1.0 + 0j, -r]), a[::-1], zi=np.array([r * complex(tail)]))
    out = np.empty(values.size, dtype=complex)
    out[-1] = tail
    out[:-1] = rev[::-1]
    return out


def exp_cumulative_left(values: np.ndarray, h: float, lam: complex, tail: complex = 0.0) -> np.ndarray:
    """J_i = int_{x_0}^{x_i} exp(-lam (x_i - t)) f(t) dt + exp(-lam (x_i - x_0)) * tail."""
    values = np.asarray(values)
    return exp_cumulative_right(values[::-1], h, lam, tail)[::-1]


def cumulative_cubic(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Running integral from grid[0] with local cubic interpolation; any increasing grid."""
    values = np.asarray(values)
    grid = np.asarray(grid, dtype=float)
    n_int = grid.size - 1
    if n_int < 3:
        return cumulative_trapezoid(values, grid, initial=0.0)
    idx = np.arange(n_int)
    start = np.clip(idx - 1, 0, n_int - 3)
    length = grid[idx + 1] - grid[idx]
    integrals = np.zeros(n_int, dtype=np.result_type(values, float))
    local = np.stack([grid[start + k] - grid[idx] for k in range(4)])
    for k in range(4):
        others = [local[l] for l in range(4) if l != k]
        e1 = others[0] + others[1] + others[2]
        e2 = others[0] * others[1] + others[0] * others[2] + others[1] * others[2]
        e3 = others[0] * others[1] * others[2]
        denom = (local[k] - others[0]) * (local[k] - others[1]) * (local[k] - others[2])
        weight = (length**4 / 4.0 - e1 * length**3 / 3.0 + e2 * length**2 / 2.0 - e3 * length) / denom
        integrals = integrals + weight * values[start + k]
    out = np.zeros(grid.size, dtype=integrals.dtype)
    out[1:] = np.cumsum(integrals)
    return out


def cubic_integral(values: np.ndarray, grid: np.ndarray) -> complex | float:
    return cumulative_cubic(values, grid)[-1]
