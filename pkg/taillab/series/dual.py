"""s(x; eps) from its Laplace-dual representation.

    s(x) = int_0^inf H(q) e^{-qx} / (q (q + 2 eps)) dq,
    H(q) = sum_{j >= m-1} eps^{j_m} F_j(q / eps).

With q = eps tau and the contour rotated onto real tau this is
(1/eps) int_0^inf G(tau) e^{-eps tau x} / (tau (tau + 2)) dtau, where
G_j = eps^{j_m} F_j is built directly so the large-tau values stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from taillab.core.errors import NumericFailure
from taillab.core.logs import get_logger
from taillab.core.quadrature import cubic_integral
from taillab.potentials import Family, PotentialSpec, Side
from taillab.series.recurrence import (
    RayFunction,
    check_ray,
    first_term,
    j_index,
    log_factorial_bound,
    ray_grid,
    recurrence_step,
)

logger = get_logger(__name__)

TAIL_TOL = 1e-10
MAX_TERMS = 60
_TAIL_TERMS = 4
_DECAY_WINDOW = 40.0


@dataclass(frozen=True)
class DualSample:
    q: complex
    H_value: complex
    s_hat_value: complex


@dataclass(frozen=True)
class SeriesReport:
    value: complex
    terms: int
    tail_bound: float
    eps: complex
    x: float


def _leading_coefficient(spec: PotentialSpec) -> float:
    if spec.family is not Family.PURE:
        raise ValueError("对偶级数只对纯幂尾 v x^(-m) 实现")
    return spec.leading_coefficient(Side.PLUS)


def _check_frequency(spec: PotentialSpec, eps: complex, x: float) -> complex:
    eps = complex(eps)
    if eps == 0:
        raise ValueError("ε 不能为 0")
    if abs(np.angle(eps)) > math.pi / 4 + 1e-12:
        raise ValueError(f"只支持 |arg ε| <= π/4，当前 ε={eps}")
    if x < spec.x_plus * (1 - 1e-12):
        raise ValueError(f"x 必须 >= x_plus={spec.x_plus}，当前 {x}")
    if abs(eps) * x > 1.0 + 1e-12:
        raise ValueError(f"|ε|x={abs(eps) * x:.3g} 超出有效范围 (<= 1)")
    return eps


def scaled_table(m: int, eps: complex, v1: float, rho: np.ndarray, theta: float, j_max: int) -> List[RayFunction]:
    """[eps^{j_m} F_j] for j = m-1..j_max on one ray."""
    head = first_term(m, theta, rho, v1)
    table = [replace(head, values=head.values * eps ** (m - 1))]
    step_v = v1 * eps ** (m - 2)
    while table[-1].j < j_max:
        table.append(recurrence_step(table[-1], m, step_v))
    return table


def _tau_grid(eps: complex, x: float) -> np.ndarray:
    rho_max = max(_DECAY_WINDOW / (eps.real * x), 8.0)
    grid = ray_grid(rho_max)
    knot = 1.0 / abs(eps)
    if knot < rho_max and np.min(np.abs(grid - knot)) > 1e-9 * knot:
        grid = np.sort(np.append(grid, knot))
    return grid


def _bound_integral(m: int, j: int, v1: float, eps: complex, x: float, tau: np.ndarray, weight: np.ndarray) -> float:
    log_b = log_factorial_bound(m, j, tau, v1) + j_index(m, j) * math.log(abs(eps))
    with np.errstate(under="ignore"):
        values = np.exp(log_b) * weight
    return float(cubic_integral(values, tau)) / abs(eps)


def reconstruct_s_report(
    spec: PotentialSpec, eps: complex, x: float, *, terms: Optional[int] = None, tol: float = TAIL_TOL
) -> SeriesReport:
    eps = _check_frequency(spec, eps, x)
    v1 = _leading_coefficient(spec)
    m = spec.m
    if v1 == 0:
        return SeriesReport(0j, m - 1, 0.0, eps, float(x))
    tau = _tau_grid(eps, x)
    inner = tau > 0
    kernel = np.zeros(tau.size, dtype=complex)
    kernel[inner] = np.exp(-eps * tau[inner] * x) / (tau[inner] * (tau[inner] + 2.0))
    weight = np.zeros(tau.size)
    weight[inner] = np.exp(-eps.real * tau[inner] * x) / (tau[inner] * (tau[inner] + 2.0))

    def tail_after(j_last: int) -> float:
        return sum(_bound_integral(m, k, v1, eps, x, tau, weight) for k in range(j_last + 1, j_last + 1 + _TAIL_TERMS))

    if terms is None:
        last = m
        bound = tail_after(last)
        while bound >= tol:
            last += 1
            if last > MAX_TERMS:
                raise NumericFailure(
                    f"对偶级数在 j={MAX_TERMS} 项内未达到尾部界 {tol:g}（ε={eps}, x={x}）",
                    hint="减小 |ε|x",
                )
            bound = tail_after(last)
    else:
        if terms < m - 1:
            raise ValueError(f"terms 必须 >= m-1={m - 1}")
        last = terms
        bound = tail_after(last)

    table = scaled_table(m, eps, v1, tau, 0.0, last)
    total = np.sum([f.values for f in table], axis=0)
    value = complex(cubic_integral(total * kernel, tau)) / eps
    logger.debug("reconstruct_s：ε=%s x=%g，J=%d，尾部界 %.2e", eps, x, last, bound)
    return SeriesReport(value, last, bound, eps, float(x))


def reconstruct_s(spec: PotentialSpec, eps: complex, x: float) -> complex:
    return reconstruct_s_report(spec, eps, x).value


def dual_samples(spec: PotentialSpec, eps: complex, q_values: Iterable[complex], *, j_max: Optional[int] = None) -> List[DualSample]:
    """(q, H, s_hat) on one ray of q; the q must share an argument."""
    eps = complex(eps)
    if eps == 0:
        raise ValueError("ε 不能为 0")
    qs = np.asarray(list(q_values), dtype=complex)
    if qs.size == 0:
        return []
    if np.any(qs == 0) or np.any(np.abs(qs + 2.0 * eps) <= 1e-14 * abs(eps)):
        raise ValueError("q 不能取 0 或 −2ε")
    taus = qs / eps
    theta = float(np.angle(taus[0]))
    if not np.allclose(np.angle(taus), theta, atol=1e-9):
        raise ValueError("q 必须位于同一条射线上")
    check_ray(theta)
    v1 = _leading_coefficient(spec)
    m = spec.m
    rho = ray_grid(1.01 * float(np.max(np.abs(taus))))
    if j_max is None:
        table = scaled_table(m, eps, v1, rho, theta, m - 1)
        scale = float(np.max(np.abs(table[0].values))) or 1.0
        while float(np.max(np.abs(table[-1].values))) > 1e-14 * scale:
            if table[-1].j >= MAX_TERMS:
                raise NumericFailure(f"H(q) 的级数在 j={MAX_TERMS} 项内未收敛（ε={eps}）", hint="缩小 |q|")
            table.append(recurrence_step(table[-1], m, v1 * eps ** (m - 2)))
    else:
        table = scaled_table(m, eps, v1, rho, theta, j_max)
    total = np.sum([f.values for f in table], axis=0)
    at = np.abs(taus)
    h_values = CubicSpline(rho, total.real)(at) + 1j * CubicSpline(rho, total.imag)(at)
    return [DualSample(complex(q), complex(h), complex(h / (q * (q + 2.0 * eps)))) for q, h in zip(qs, h_values)]
