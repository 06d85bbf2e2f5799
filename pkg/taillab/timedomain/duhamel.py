"""Duhamel fixed point u = u_free - int_0^t S(t - s) [V u(s)] ds.

S(tau) f(x) = 1/2 int_{x-tau}^{x+tau} f. With dt = h every light-cone shift
is a whole number of cells, so S is two lookups into a running integral.
The increment is measured in sup_t e^{-nu t} ||.||_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from taillab.core.errors import NumericFailure
from taillab.core.grids import uniform_grid
from taillab.core.logs import get_logger
from taillab.potentials import PotentialSpec, sample
from taillab.potentials.evaluate import sup_norm

logger = get_logger(__name__)

GROWTH_STREAK = 3
NU_MARGIN = 1.1


@dataclass(frozen=True)
class DuhamelResult:
    grid: np.ndarray
    times: np.ndarray
    u: np.ndarray
    iterations: int
    increments: Tuple[float, ...]
    nu: float
    v_sup: float

    @property
    def contraction_bound(self) -> float:
        """2 ||V||_inf / nu^2."""
        return 2.0 * self.v_sup / self.nu**2

    def value_at(self, x: float, t: float) -> float:
        i = int(np.argmin(np.abs(self.grid - x)))
        n = int(np.argmin(np.abs(self.times - t)))
        return float(self.u[n, i])


@dataclass(frozen=True)
class ContractionReport:
    ratios: Tuple[float, ...]
    bound: float

    @property
    def worst(self) -> float:
        return max(self.ratios, default=0.0)

    @property
    def ok(self) -> bool:
        return self.worst <= self.bound * (1.0 + 1e-9)


def default_nu(v_sup: float) -> float:
    """Above the contraction threshold sqrt(2 ||V||_inf) by NU_MARGIN, twice over."""
    return NU_MARGIN * 2.0 * math.sqrt(2.0 * max(v_sup, 1e-300))


def _shifted(f: np.ndarray, shift: int) -> Tuple[np.ndarray, np.ndarray]:
    """Rows of f read at i + shift and i - shift, clamped at the ends."""
    n = f.shape[-1]
    idx = np.arange(n)
    return f[..., np.clip(idx + shift, 0, n - 1)], f[..., np.clip(idx - shift, 0, n - 1)]


def free_evolution(u0: np.ndarray, u1: np.ndarray, h: float, steps: int) -> np.ndarray:
    """d'Alembert on the grid at t_n = n h."""
    primitive = cumulative_trapezoid(u1, dx=h, initial=0.0)
    out = np.empty((steps + 1, u0.size))
    for n in range(steps + 1):
        right0, left0 = _shifted(u0, n)
        right1, left1 = _shifted(primitive, n)
        out[n] = 0.5 * (right0 + left0) + 0.5 * (right1 - left1)
    return out


def _duhamel_term(source: np.ndarray, h: float) -> np.ndarray:
    """int_0^{t_n} S(t_n - s) source(s) ds, trapezoid in s."""
    steps = source.shape[0] - 1
    primitive = cumulative_trapezoid(source, dx=h, axis=1, initial=0.0)
    weights = np.full((steps + 1, 1), h)
    weights[0] = 0.5 * h
    out = np.zeros_like(source)
    # S(0) = 0, so the s = t_n endpoint never contributes
    for lag in range(1, steps + 1):
        right, left = _shifted(primitive[: steps + 1 - lag], lag)
        out[lag:] += 0.5 * weights[: steps + 1 - lag] * (right - left)
    return out


def duhamel_solve(
    spec: PotentialSpec,
    psi0: Callable[[np.ndarray], np.ndarray],
    psi1: Callable[[np.ndarray], np.ndarray],
    final_time: float,
    tolerance: float = 1e-10,
    *,
    h: float = 0.02,
    support: float = 2.0,
    nu: Optional[float] = None,
    max_iter: int = 200,
) -> DuhamelResult:
    if final_time <= 0 or h <= 0:
        raise ValueError(f"T 与 h 必须为正（T={final_time}, h={h}）")
    half_width = support + final_time + 1.0
    grid = uniform_grid(-half_width, half_width, h)
    steps = int(round(final_time / h))
    times = h * np.arange(steps + 1)
    potential = sample(spec, grid)
    v_sup = sup_norm(spec)
    nu = default_nu(v_sup) if nu is None else float(nu)
    if nu <= 0:
        raise ValueError(f"nu 必须 > 0，当前 {nu}")
    weight = np.exp(-nu * times)

    base = free_evolution(np.asarray(psi0(grid), dtype=float), np.asarray(psi1(grid), dtype=float), h, steps)
    u = base
    increments: List[float] = []
    streak = 0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new = base - _duhamel_term(potential[None, :] * u, h)
        increment = float(np.max(weight * h * np.sum(np.abs(new - u), axis=1)))
        u = new
        increments.append(increment)
        logger.debug("Duhamel 迭代 %d：加权增量 %.3e", iterations, increment)
        if increment < tolerance:
            break
        if len(increments) > 1 and increment > increments[-2]:
            streak += 1
            if streak >= GROWTH_STREAK:
                raise NumericFailure(
                    f"Duhamel 迭代发散（ν={nu:.3g}，收缩界 {2 * v_sup / nu**2:.3g}）",
                    hint="增大 ν 使 2‖V‖∞/ν² < 1",
                )
        else:
            streak = 0
    else:
        raise NumericFailure(f"Duhamel 迭代 {max_iter} 次后仍未收敛（增量 {increments[-1]:.3e}）")
    logger.info("Duhamel 收敛：%d 次迭代，ν=%.3g", iterations, nu)
    return DuhamelResult(grid, times, u, iterations, tuple(increments), nu, v_sup)


def contraction_report(result: DuhamelResult) -> ContractionReport:
    """Observed ratios of successive increments against 2 ||V||_inf / nu^2."""
    inc = [i for i in result.increments if i > 0]
    ratios = tuple(b / a for a, b in zip(inc, inc[1:]))
    return ContractionReport(ratios, result.contraction_bound)
