"""I(n, l; a) = int_3^inf e^{-a tau} tau^n (ln tau)^l dtau for small a = eps x.

Leading behaviour: I ~ A(a) + a^{-n-1} sum_q c_q (ln a)^q, where A is the
Taylor polynomial of the convergent part (present only for n <= -2).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Tuple

import mpmath
import numpy as np
from scipy.integrate import quad
from scipy.special import comb

LOWER = 3.0


def _check(n: int, l: int, a: float) -> None:
    if int(n) != n or n < -2:
        raise ValueError(f"n 必须为 >= -2 的整数，当前 {n}")
    if l not in (0, 1, 2):
        raise ValueError(f"l 必须取 0、1 或 2，当前 {l}")
    if not 0.0 < a <= 1.0:
        raise ValueError(f"εx 必须位于 (0, 1] 内，当前 {a}")


def nm0_integral(n: int, l: int, eps_x: float) -> float:
    """Adaptive quadrature after u = a tau: a^{-n-1} int_{3a}^inf e^{-u} u^n (ln u - ln a)^l du."""
    _check(n, l, eps_x)
    a = float(eps_x)
    log_a = math.log(a)

    def integrand(u: float) -> float:
        return math.exp(-u) * u**n * (math.log(u) - log_a) ** l

    lo = LOWER * a
    total = 0.0
    if lo < 1.0:
        total += quad(integrand, lo, 1.0, limit=200, epsabs=0.0, epsrel=1e-12)[0]
        total += quad(integrand, 1.0, np.inf, limit=200)[0]
    else:
        total += quad(integrand, lo, np.inf, limit=200)[0]
    return a ** (-n - 1) * total


def _max_log_power(n: int, l: int) -> int:
    return l if n >= 0 else l + 1


@lru_cache(maxsize=None)
def nm0_coefficients(n: int, l: int) -> Tuple[float, ...]:
    """(c_0, ..., c_qmax). For n <= -2, c_0 belongs to the analytic part and is returned as 0."""
    if int(n) != n or n < -2 or l < 0:
        raise ValueError(f"需要整数 n >= -2 且 l >= 0，当前 n={n}, l={l}")
    if n >= 0:
        with mpmath.workdps(30):
            return tuple(
                float(mpmath.diff(mpmath.gamma, n + 1, l - q)) * (-1) ** q * float(comb(l, q, exact=True))
                for q in range(l + 1)
            )
    if n == -1:
        upper = nm0_coefficients(0, l + 1)
        out = [c / (l + 1) for c in upper]
        # boundary term of the integration by parts
        out[0] -= math.log(LOWER) ** (l + 1) / (l + 1)
        return tuple(out)
    size = _max_log_power(n, l) + 1
    upper = nm0_coefficients(n + 1, l) + (0.0,) * size
    lower = nm0_coefficients(n, l - 1) + (0.0,) * size if l > 0 else (0.0,) * size
    out = [(upper[q] - l * lower[q]) / (n + 1) for q in range(size)]
    out[0] = 0.0
    return tuple(out)


def analytic_part(n: int, l: int, eps_x: float) -> float:
    """sum_{k=0}^{-n-2} (-a)^k / k! int_3^inf tau^{n+k} (ln tau)^l dtau; zero for n >= -1."""
    total = 0.0
    for k in range(0, -n - 1):
        moment = quad(lambda t: t ** (n + k) * math.log(t) ** l, LOWER, np.inf, limit=200)[0]
        total += (-eps_x) ** k / math.factorial(k) * moment
    return total


def nm0_expansion(n: int, l: int, eps_x: float) -> float:
    _check(n, l, eps_x)
    log_a = math.log(eps_x)
    coeffs = nm0_coefficients(n, l)
    head = sum(c * log_a**q for q, c in enumerate(coeffs))
    return analytic_part(n, l, eps_x) + eps_x ** (-n - 1) * head


def estimate_leading_coefficient(n: int, l: int, eps_x: float) -> float:
    """c_qmax from the qmax-th forward difference in ln a of a^{n+1} (I - A) at a 2^k."""
    _check(n, l, eps_x)
    order = _max_log_power(n, l)
    if eps_x * 2**order > 1.0:
        raise ValueError(f"εx={eps_x} 太大，差分点超出 (0, 1]")
    points = [eps_x * 2**k for k in range(order + 1)]
    samples = [a ** (n + 1) * (nm0_integral(n, l, a) - analytic_part(n, l, a)) for a in points]
    diff = np.diff(samples, n=order)[0] if order else samples[0]
    return float(diff / (math.factorial(order) * math.log(2.0) ** order))
