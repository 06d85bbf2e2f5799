"""Inverse Laplace transform along a vertical Bromwich line.

The trapezoid rule is accelerated with the quotient-difference continued
fraction (de Hoog, Knight and Stokes); times are inverted one decade at a
time with T = 2 max(t) of the decade.
"""

from __future__ import annotations

from typing import Callable, Dict, Iterable, List, Optional, Union

import numpy as np
from scipy.integrate import quad

from taillab.core.errors import NumericFailure
from taillab.core.logs import get_logger
from taillab.core.workers import map_ordered
from taillab.ilt.contours import QuadratureRule, VerticalLine

logger = get_logger(__name__)

Sampler = Callable[[complex], complex]

CONVERGENCE_TOL = 1e-8


def _decades(ts: np.ndarray) -> List[np.ndarray]:
    """Index groups of t with equal floor(log10 t)."""
    exponents = np.floor(np.log10(ts)).astype(int)
    return [np.flatnonzero(exponents == k) for k in np.unique(exponents)]


def _continued_fraction(fp: np.ndarray, degree: int) -> np.ndarray:
    """Coefficients d of the continued fraction equivalent to the power series sum fp_k z^k (fp_0 halved)."""
    n = 2 * degree + 1
    e = np.zeros((n, degree + 1), dtype=complex)
    q = np.zeros((n, degree), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        q[0, 0] = fp[1] / (fp[0] / 2.0)
        q[1 : 2 * degree, 0] = fp[2 : 2 * degree + 1] / fp[1 : 2 * degree]
        for r in range(1, degree + 1):
            mr = 2 * (degree - r)
            e[0:mr, r] = q[1 : mr + 1, r - 1] - q[0:mr, r - 1] + e[1 : mr + 1, r - 1]
            if r < degree:
                mq = mr - 1
                q[0:mq, r] = q[1 : mq + 1, r - 1] * e[1 : mq + 1, r] / e[0:mq, r]
    d = np.empty(n, dtype=complex)
    d[0] = fp[0] / 2.0
    d[1::2] = -q[0, :degree]
    d[2::2] = -e[0, 1 : degree + 1]
    return d


def _pade(d: np.ndarray, z: np.ndarray) -> np.ndarray:
    """A/B of the accelerated continued fraction at every z, with the improved remainder."""
    n = d.size
    degree = (n - 1) // 2
    a_prev, a_cur = np.zeros_like(z), np.full_like(z, d[0])
    b_prev, b_cur = np.ones_like(z), np.ones_like(z)
    for i in range(1, 2 * degree):
        a_prev, a_cur = a_cur, a_cur + d[i] * a_prev * z
        b_prev, b_cur = b_cur, b_cur + d[i] * b_prev * z
    brem = (1.0 + (d[2 * degree - 1] - d[2 * degree]) * z) / 2.0
    rem = -brem * (1.0 - np.sqrt(1.0 + d[2 * degree] * z / brem**2))
    with np.errstate(divide="ignore", invalid="ignore"):
        return (a_cur + rem * a_prev) / (b_cur + rem * b_prev)


def _check_decay(fp: np.ndarray, label: str) -> None:
    head, tail = abs(fp[0]), abs(fp[-1])
    if not np.all(np.isfinite(fp)):
        raise NumericFailure(f"{label}：采样值含 NaN/inf")
    if head > 0 and tail >= head:
        raise NumericFailure(
            f"{label}：采样函数沿直线不衰减（|F(首)|={head:.3e}，|F(尾)|={tail:.3e}）",
            hint="增大截断长度或检查采样函数",
        )


class _NodeCache:
    """Sampler values at gamma +- i pi k / T, grown on demand."""

    def __init__(self, sampler: Sampler, gamma: float, period: float, both_sides: bool) -> None:
        self.sampler = sampler
        self.gamma = gamma
        self.period = period
        self.both_sides = both_sides
        self.upper = np.empty(0, dtype=complex)
        self.lower = np.empty(0, dtype=complex)

    def _eval(self, nodes: np.ndarray) -> np.ndarray:
        return np.asarray(map_ordered(lambda p: complex(self.sampler(complex(p))), nodes), dtype=complex)

    def grow(self, count: int) -> None:
        have = self.upper.size
        if count <= have:
            return
        k = np.arange(have, count)
        nodes = self.gamma + 1j * np.pi * k / self.period
        self.upper = np.concatenate([self.upper, self._eval(nodes)])
        if self.both_sides:
            lower = np.conj(nodes)
            if have == 0:
                # k = 0 is shared by both sides
                lower_vals = np.concatenate([self.upper[:1], self._eval(lower[1:])])
            else:
                lower_vals = self._eval(lower)
            self.lower = np.concatenate([self.lower, lower_vals])


def _invert_decade(sampler: Sampler, ts: np.ndarray, line: VerticalLine) -> np.ndarray:
    period = 2.0 * float(np.max(ts))
    alpha = 0.0 if line.shift is None else float(line.shift)
    gamma = alpha - np.log(line.tol) / (2.0 * period)
    cache = _NodeCache(sampler, gamma, period, both_sides=not line.real_output)
    z = np.exp(1j * np.pi * ts / period)

    def evaluate(degree: int) -> np.ndarray:
        count = 2 * degree + 1
        cache.grow(count)
        fp = cache.upper[:count]
        if not np.any(fp):
            return np.zeros(ts.shape, dtype=float if line.real_output else complex)
        _check_decay(fp, "Bromwich 积分")
        upper = _pade(_continued_fraction(fp, degree), z)
        if line.real_output:
            value = np.exp(gamma * ts) / period * upper.real
        else:
            fl = cache.lower[:count]
            lower = _pade(_continued_fraction(fl, degree), np.conj(z))
            value = np.exp(gamma * ts) / (2.0 * period) * (upper + lower)
        if not np.all(np.isfinite(value)):
            raise NumericFailure("Bromwich 积分：连分式加速出现 NaN", hint="检查采样函数在直线右侧是否解析")
        return value

    degree = line.degree
    value = evaluate(degree)
    converged = not line.adaptive or degree >= line.max_degree
    while not converged and degree < line.max_degree:
        next_degree = min(2 * degree, line.max_degree)
        refined = evaluate(next_degree)
        change = float(np.max(np.abs(refined - value)))
        scale = max(float(np.max(np.abs(refined))), 1e-300)
        logger.debug("QD 表深度 %d -> %d：变化 %.2e（相对 %.2e）", degree, next_degree, change, change / scale)
        degree, value = next_degree, refined
        converged = change <= CONVERGENCE_TOL * scale
    if not converged:
        logger.warning("Bromwich 积分在 degree=%d 时未达到收敛阈值（t∈[%g, %g]）", degree, ts.min(), ts.max())
    return value


def _fourier(sampler: Sampler, t: float, line: VerticalLine) -> float:
    """f(t) = e^{ct}/pi int_0^inf [Re F(c+iy) cos(yt) - Im F(c+iy) sin(yt)] dy."""
    c = line.fourier_shift(t)
    memo: Dict[float, complex] = {}

    def value(y: float) -> complex:
        if y not in memo:
            memo[y] = complex(sampler(complex(c, y)))
        return memo[y]

    opts = dict(limlst=200, limit=400, epsabs=1e-14)
    cos_part, _ = quad(lambda y: value(y).real, 0.0, np.inf, weight="cos", wvar=t, **opts)
    sin_part, _ = quad(lambda y: value(y).imag, 0.0, np.inf, weight="sin", wvar=t, **opts)
    result = np.exp(c * t) / np.pi * (cos_part - sin_part)
    if not np.isfinite(result):
        raise NumericFailure(f"Bromwich 积分（fourier，t={t:g}）结果非有限")
    return float(result)


def bromwich_many(sampler: Sampler, ts: Iterable[float], contour: Optional[VerticalLine] = None) -> np.ndarray:
    line = contour or VerticalLine()
    times = np.asarray(list(ts), dtype=float)
    if times.size == 0:
        return np.empty(0)
    if np.any(times <= 0):
        raise ValueError("t 必须全部 > 0")
    if line.rule is QuadratureRule.FOURIER:
        return np.array([_fourier(sampler, float(t), line) for t in times])
    out = np.zeros(times.shape, dtype=float if line.real_output else complex)
    for group in _decades(times):
        out[group] = _invert_decade(sampler, times[group], line)
    return out


def bromwich(sampler: Sampler, t: float, contour: Optional[VerticalLine] = None) -> Union[float, complex]:
    """(1/2 pi i) int e^{eps t} F(eps) d eps along the line; float when the contour asks for real output."""
    value = bromwich_many(sampler, [t], contour)[0]
    return float(value) if np.isrealobj(value) else complex(value)
