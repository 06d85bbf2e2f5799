"""Smoothstep blending between the exact tails and the compact well term."""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import poch

from taillab.potentials.base import PotentialSpec, PowerTerm, Side


@lru_cache(maxsize=16)
def smoothstep(n: int) -> Polynomial:
    """Degree 2n+1 polynomial rising from 0 to 1 on [0, 1] with n flat derivatives at both ends."""
    coeffs = np.zeros(2 * n + 2)
    for k in range(n + 1):
        coeffs[n + k + 1] = (-1) ** k * comb(n + k, k) * comb(2 * n + 1, n - k)
    return Polynomial(coeffs)


def smoothstep_derivative(n: int, u: np.ndarray, order: int) -> np.ndarray:
    """order-th derivative of the clamped smoothstep at u (0 below, 1 above the ramp)."""
    u = np.asarray(u, dtype=float)
    inside = (u > 0.0) & (u < 1.0)
    out = np.zeros_like(u)
    poly = smoothstep(n).deriv(order) if order else smoothstep(n)
    out[inside] = poly(u[inside])
    if order == 0:
        out[u >= 1.0] = 1.0
    return out


def power_tail(terms: Sequence[PowerTerm], x: np.ndarray, side: Side, order: int = 0) -> np.ndarray:
    """order-th derivative of sum c |x|^(-alpha) on one side (x > 0 for PLUS, x < 0 for MINUS)."""
    x = np.asarray(x, dtype=float)
    r = x if side is Side.PLUS else -x
    out = np.zeros_like(x)
    safe = r > 0
    sign = (-1.0) ** order if side is Side.PLUS else 1.0
    for term in terms:
        out[safe] += term.coefficient * sign * poch(term.exponent, order) * r[safe] ** (-term.exponent - order)
    return out


def bridged_tail(spec: PotentialSpec, x: np.ndarray, side: Side, order: int = 0) -> np.ndarray:
    """Leibniz rule for S(u(x)) * T(x), the ramp running over [cutoff/2, cutoff]."""
    x = np.asarray(x, dtype=float)
    terms = spec.tail_terms(side)
    if not terms:
        return np.zeros_like(x)
    n = spec.smoothness
    cutoff = spec.cutoff(side)
    half = 0.5 * abs(cutoff)
    if side is Side.PLUS:
        u = (x - half) / half
        du = 1.0 / half
        active = x > half
    else:
        u = (-half - x) / half
        du = -1.0 / half
        active = x < -half
    out = np.zeros_like(x)
    if not np.any(active):
        return out
    xa = x[active]
    ua = u[active]
    acc = np.zeros_like(xa)
    for i in range(order + 1):
        s_i = smoothstep_derivative(n, ua, i)
        if not np.any(s_i):
            continue
        acc += comb(order, i) * s_i * du**i * power_tail(terms, xa, side, order - i)
    out[active] = acc
    return out


@lru_cache(maxsize=16)
def _well_profile(exponent: int) -> Polynomial:
    # (1 - s^2)^exponent in the scaled variable s = x / w
    return Polynomial([1.0, 0.0, -1.0]) ** exponent


def well(spec: PotentialSpec, x: np.ndarray, order: int = 0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if spec.well_depth == 0.0:
        return out
    w = spec.well_halfwidth
    inside = np.abs(x) < w
    poly = _well_profile(spec.m + 3)
    if order:
        poly = poly.deriv(order)
    out[inside] = spec.well_depth * poly(x[inside] / w) / w**order
    return out
