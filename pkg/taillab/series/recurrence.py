"""Dual-space recurrence F_{j+1} = v P^m [F_j / (tau (tau + 2))] on rays tau = rho e^{i theta}.

P is the antiderivative from 0 along the ray. F_{m-1} = v tau^{m-1} / (m-1)!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.special import gammaln

from taillab.core.grids import grid_step, stencil_derivative
from taillab.core.logs import get_logger
from taillab.core.quadrature import cumulative_cubic

logger = get_logger(__name__)

SECTOR_LO = -math.pi / 4
SECTOR_HI = 5 * math.pi / 4
MIN_POLE_DISTANCE = 0.5
STANDARD_RAYS = (0.0, math.pi / 3, 2 * math.pi / 3)


def j_index(m: int, j: int) -> int:
    """Power of eps carried by F_j: (m-2)(j-m+1) + m - 1."""
    return (m - 2) * (j - m + 1) + m - 1


def pole_distance(theta: float) -> float:
    """Distance from tau = -2 to the ray of angle theta."""
    c = math.cos(theta)
    return 2.0 if c >= 0 else 2.0 * abs(math.sin(theta))


def sector_constant(theta: float) -> float:
    """sup over the ray of |tau| / |tau + 2|."""
    if math.cos(theta) >= 0:
        return 1.0
    return 1.0 / abs(math.sin(theta))


def check_ray(theta: float) -> None:
    if not SECTOR_LO < theta < SECTOR_HI:
        raise ValueError(f"射线角 θ={theta:.4f} 不在 (−π/4, 5π/4) 内")
    if pole_distance(theta) < MIN_POLE_DISTANCE:
        raise ValueError(f"射线 θ={theta:.4f} 过于接近 τ=−2")


def ray_grid(rho_max: float, *, h: float = 0.01, knee: float = 4.0, ratio: float = 1.002) -> np.ndarray:
    """Uniform on [0, knee], geometric beyond."""
    if rho_max <= 0:
        raise ValueError(f"rho_max 必须 > 0，当前 {rho_max}")
    n_uniform = int(round(min(knee, rho_max) / h))
    head = h * np.arange(n_uniform + 1, dtype=float)
    if rho_max <= knee:
        if head[-1] < rho_max:
            head = np.append(head, rho_max)
        return head
    n_geo = int(math.ceil(math.log(rho_max / head[-1]) / math.log(ratio)))
    tail = head[-1] * ratio ** np.arange(1, n_geo + 1, dtype=float)
    tail[-1] = rho_max
    return np.concatenate([head, tail])


@dataclass(frozen=True)
class RayFunction:
    """F_j sampled on tau = rho e^{i theta}."""

    j: int
    m: int
    theta: float
    rho: np.ndarray
    values: np.ndarray

    @property
    def tau(self) -> np.ndarray:
        return self.rho * np.exp(1j * self.theta)

    @property
    def power(self) -> int:
        return j_index(self.m, self.j)


def first_term(m: int, theta: float, rho: np.ndarray, v1: float = 1.0) -> RayFunction:
    if m < 3:
        raise ValueError(f"m 必须 >= 3，当前 {m}")
    check_ray(theta)
    rho = np.asarray(rho, dtype=float)
    if rho[0] != 0.0 or np.any(np.diff(rho) <= 0):
        raise ValueError("rho 网格必须从 0 开始且严格递增")
    tau = rho * np.exp(1j * theta)
    values = v1 * tau ** (m - 1) / math.factorial(m - 1)
    return RayFunction(m - 1, m, theta, rho, values.astype(complex))


def _antiderivative(values: np.ndarray, f: RayFunction) -> np.ndarray:
    return np.exp(1j * f.theta) * cumulative_cubic(values, f.rho)


def recurrence_step(f: RayFunction, m: Optional[int] = None, v1: float = 1.0) -> RayFunction:
    m = f.m if m is None else m
    if m != f.m:
        raise ValueError(f"m={m} 与 F_j 的 m={f.m} 不一致")
    check_ray(f.theta)
    tau = f.tau
    g = np.zeros_like(f.values)
    inner = tau != 0
    g[inner] = f.values[inner] / (tau[inner] * (tau[inner] + 2.0))
    for _ in range(m):
        g = _antiderivative(g, f)
    return RayFunction(f.j + 1, m, f.theta, f.rho, v1 * g)


def build_f_table(
    m: int,
    theta: float = 0.0,
    rho_max: float = 50.0,
    j_max: Optional[int] = None,
    v1: float = 1.0,
    *,
    rho: Optional[np.ndarray] = None,
) -> List[RayFunction]:
    """[F_{m-1}, ..., F_{j_max}] on one ray."""
    j_max = m + 5 if j_max is None else j_max
    if j_max < m - 1:
        raise ValueError(f"j_max 必须 >= m-1={m - 1}")
    grid = ray_grid(rho_max) if rho is None else np.asarray(rho, dtype=float)
    table = [first_term(m, theta, grid, v1)]
    while table[-1].j < j_max:
        table.append(recurrence_step(table[-1], m, v1))
    logger.debug("F 表：m=%d θ=%.3f，j=%d..%d，%d 个节点", m, theta, m - 1, j_max, grid.size)
    return table


def log_factorial_bound(m: int, j: int, rho: np.ndarray, v1: float = 1.0, theta: float = 0.0) -> np.ndarray:
    """log of C^{j-m+1} |v|^{j-m+2} |tau|^{j_m} / ((j_m - m + 1)!)^{m/(m-2)}."""
    jm = j_index(m, j)
    steps = j - m + 1
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore"):
        log_rho = np.log(rho)
    out = (
        steps * math.log(sector_constant(theta))
        + (steps + 1) * math.log(abs(v1))
        + jm * log_rho
        - m / (m - 2) * gammaln(jm - m + 2)
    )
    return out


def factorial_bound(m: int, j: int, rho: np.ndarray, v1: float = 1.0, theta: float = 0.0) -> np.ndarray:
    return np.exp(log_factorial_bound(m, j, rho, v1, theta))


def bound_holds(f: RayFunction, v1: float = 1.0, *, slack: float = 1e-9) -> bool:
    bound = factorial_bound(f.m, f.j, f.rho, v1, f.theta)
    return bool(np.all(np.abs(f.values) <= bound * (1.0 + slack) + 1e-300))


def recurrence_residual(f_next: RayFunction, f_prev: RayFunction, v1: float = 1.0) -> np.ndarray:
    """|tau (tau + 2) F_{j+1}^{(m)} - v F_j| / max|F_j| on a uniform rho grid; ends excluded (zero)."""
    if f_next.j != f_prev.j + 1 or not np.array_equal(f_next.rho, f_prev.rho):
        raise ValueError("需要同一射线上相邻的 F_j, F_{j+1}")
    h = grid_step(f_next.rho)
    deriv = f_next.values
    for _ in range(f_next.m):
        deriv = stencil_derivative(deriv, h) * np.exp(-1j * f_next.theta)
    tau = f_next.tau
    res = np.abs(tau * (tau + 2.0) * deriv - v1 * f_prev.values) / max(float(np.max(np.abs(f_prev.values))), 1e-300)
    edge = 3 * f_next.m
    res[:edge] = 0.0
    res[-edge:] = 0.0
    return res
