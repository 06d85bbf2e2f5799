"""Resolvent G = (d^2/dx^2 - V - eps^2)^(-1) built from the Jost pair, plus the free pieces G0, G1."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad

from taillab.core.errors import NumericFailure, SpectralAssumptionError
from taillab.core.grids import EDGE, GridFunction, bracket, extend_uniform, grid_step, nearest_index, stencil_derivative
from taillab.core.logs import get_logger
from taillab.core.quadrature import exp_cumulative_left, exp_cumulative_right
from taillab.core.workers import map_ordered
from taillab.frequency.jost import Frequency, JostSettings, jost_pair
from taillab.frequency.wronskian import wronskian
from taillab.potentials import PotentialSpec, sample

logger = get_logger(__name__)

W_FLOOR = 1e-10
FIT_CONDITION_LIMIT = 1e12

EpsLike = Union[Frequency, complex, float]


class GreenOperator:
    """The Jost pair and W at one eps, prepared on the (extended) grid of the data."""

    def __init__(
        self,
        spec: PotentialSpec,
        eps: EpsLike,
        grid: np.ndarray,
        *,
        settings: Optional[JostSettings] = None,
        w_floor: float = W_FLOOR,
    ) -> None:
        self.spec = spec
        self.epsilon = Frequency.of(eps)
        self.grid = np.asarray(grid, dtype=float)
        self.step = grid_step(self.grid)
        lo = min(self.grid[0], spec.x_minus)
        hi = max(self.grid[-1], spec.x_plus)
        self.jost_grid, self.offset = extend_uniform(self.grid, lo, hi)
        self.y_plus, self.y_minus = jost_pair(spec, self.epsilon, self.jost_grid, settings=settings)
        self.w = wronskian(self.y_plus, self.y_minus)
        if abs(self.w) < w_floor:
            raise SpectralAssumptionError(
                f"|W(ε)|={abs(self.w):.3e} 低于阈值 {w_floor:.1e}（ε={self.epsilon.value}），预解式不可用",
                hint="先运行谱检查，排除束缚态与零能共振",
            )

    def _padded(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros(self.jost_grid.shape, dtype=complex)
        out[self.offset : self.offset + values.size] = values
        return out

    def apply(self, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(G f, (G f)') on the data grid."""
        f = self._padded(np.asarray(values))
        eps = self.epsilon.value
        ap, am = self.y_plus.a, self.y_minus.a
        dap, dam = self.y_plus.a_prime, self.y_minus.a_prime
        right = exp_cumulative_right(ap * f, self.step, eps)
        left = exp_cumulative_left(am * f, self.step, eps)
        g = -(am * right + ap * left) / self.w
        dg = -((dam + eps * am) * right + (dap - eps * ap) * left) / self.w
        window = slice(self.offset, self.offset + self.grid.size)
        return g[window], dg[window]

    def apply_function(self, f: GridFunction) -> GridFunction:
        if f.grid.shape != self.grid.shape or not np.array_equal(f.grid, self.grid):
            raise ValueError("数据网格与预解算子网格不一致")
        g, dg = self.apply(f.values)
        return GridFunction(self.grid, g, dg)


def green_apply(spec: PotentialSpec, eps: EpsLike, f: GridFunction, *, settings: Optional[JostSettings] = None) -> GridFunction:
    """G f = -(a- I+ + a+ I-) / W with I+- the exponentially weighted one-sided integrals of a+- f."""
    if f.is_zero():
        return GridFunction(f.grid, np.zeros(f.grid.shape, dtype=complex), np.zeros(f.grid.shape, dtype=complex))
    return GreenOperator(spec, eps, f.grid, settings=settings).apply_function(f)


def _free_integrals(eps: EpsLike, f: GridFunction) -> Tuple[complex, np.ndarray, np.ndarray]:
    e = Frequency.of(eps).value
    h = grid_step(f.grid)
    values = np.asarray(f.values, dtype=complex)
    return e, exp_cumulative_right(values, h, e), exp_cumulative_left(values, h, e)


def free_g0(eps: EpsLike, f: GridFunction) -> GridFunction:
    e, right, left = _free_integrals(eps, f)
    denom = 2.0 * (1.0 + e)
    return GridFunction(f.grid, (-right - left) / denom, e * (left - right) / denom)


def free_g1(eps: EpsLike, f: GridFunction) -> GridFunction:
    e, right, left = _free_integrals(eps, f)
    denom = 2.0 * (1.0 + e)
    return GridFunction(f.grid, (left - right) / denom, (2.0 * f.values - e * (right + left)) / denom)


def free_g0_time(f: Callable[[float], float], x: float, t: float) -> float:
    """Inverse Laplace transform of G0 f at (x, t):
    -1/2 int_x^{x+t} e^{-t+u-x} f(u) du - 1/2 int_{x-t}^x e^{-t+x-u} f(u) du."""
    if t <= 0:
        return 0.0
    right, _ = quad(lambda u: np.exp(-t + u - x) * f(u), x, x + t, limit=400)
    left, _ = quad(lambda u: np.exp(-t + x - u) * f(u), x - t, x, limit=400)
    return -0.5 * (right + left)


@dataclass(frozen=True)
class ResolventResult:
    epsilon: Frequency
    psi_hat: GridFunction
    parts: Optional[Dict[str, GridFunction]] = None


def _combine(psi0: GridFunction, psi1: GridFunction, eps: complex) -> GridFunction:
    if psi0.grid.shape != psi1.grid.shape or not np.array_equal(psi0.grid, psi1.grid):
        raise ValueError("ψ₀ 与 ψ₁ 的网格不一致")
    return GridFunction(psi0.grid, psi1.values + eps * psi0.values)


def psi_hat(
    spec: PotentialSpec,
    eps: EpsLike,
    psi0: GridFunction,
    psi1: GridFunction,
    *,
    decompose: bool = False,
    settings: Optional[JostSettings] = None,
) -> ResolventResult:
    """psi_hat = G(psi1 + eps psi0); decompose also returns G0(psi1) and the remainder."""
    freq = Frequency.of(eps)
    rhs = _combine(psi0, psi1, freq.value)
    result = green_apply(spec, freq, rhs, settings=settings)
    parts = None
    if decompose:
        free = free_g0(freq, psi1)
        parts = {
            "free": free,
            "remainder": GridFunction(result.grid, result.values - free.values, result.derivative - free.derivative),
        }
    return ResolventResult(freq, result, parts)


def psi_hat_many(
    spec: PotentialSpec, eps_values: Sequence[EpsLike], psi0: GridFunction, psi1: GridFunction
) -> list:
    return map_ordered(lambda e: psi_hat(spec, e, psi0, psi1), list(eps_values))


def green_apply_at(spec: PotentialSpec, psi0: GridFunction, psi1: GridFunction, x0: float) -> Callable[[complex], complex]:
    """Sampler eps -> psi_hat(x0, eps) for the inverse Laplace transform."""
    index = nearest_index(psi1.grid, x0, tol=0.5 * grid_step(psi1.grid))

    def sampler(eps: complex) -> complex:
        return complex(psi_hat(spec, eps, psi0, psi1).psi_hat.values[index])

    return sampler


def resolvent_residual(spec: PotentialSpec, eps: EpsLike, result: GridFunction, rhs: GridFunction) -> np.ndarray:
    """|psi'' - (V + eps^2) psi - rhs| / max|rhs|, psi'' from the stencil on psi'; EDGE points are zero."""
    e = Frequency.of(eps).value
    h = grid_step(result.grid)
    second = stencil_derivative(result.derivative_values(), h)
    raw = np.abs(second - (sample(spec, result.grid) + e * e) * result.values - rhs.values)
    scale = max(rhs.sup_norm(), 1e-300)
    out = raw / scale
    out[:EDGE] = 0.0
    out[-EDGE:] = 0.0
    return out


class FitKind(str, Enum):
    SINE = "sine"
    COSINE = "cosine"


@dataclass(frozen=True)
class SingularFit:
    kind: FitKind
    x0: float
    coefficient: float
    residual: float
    condition: float
    eps: Tuple[float, ...]
    samples: Tuple[float, ...]

    def time_amplitude(self, m: int) -> float:
        """Leading amplitude of psi(x0, t) ~ amplitude * t^(-p-1), p = m-1 (sine) or m (cosine)."""
        p = m - 1 if self.kind is FitKind.SINE else m
        return float((-1) ** (p + 1) * np.prod(np.arange(1, p + 1)) * self.coefficient)


def default_fit_grid() -> np.ndarray:
    return np.geomspace(1e-2, 1e-1, 12)


def _fit_sample(
    spec: PotentialSpec, psi0: GridFunction, psi1: GridFunction, index: int, kind: FitKind, eps: float
) -> float:
    op = GreenOperator(spec, eps, psi1.grid)
    if kind is FitKind.SINE:
        g, _ = op.apply(psi1.values)
        d = g[index] - free_g0(eps, psi1).values[index]
    else:
        g, _ = op.apply(eps * psi0.values)
        ratio = eps / (eps + 1.0)
        dpsi0 = GridFunction(psi0.grid, psi0.derivative_values())
        model = (
            -psi0.values[index] * eps / (eps + 1.0) ** 2
            + ratio * free_g0(eps, psi0).values[index]
            + ratio * free_g1(eps, dpsi0).values[index]
        )
        d = g[index] - model
    return float(np.real(d))


def fit_singular_coefficient(
    spec: PotentialSpec,
    psi0: GridFunction,
    psi1: GridFunction,
    x0: float,
    eps_grid: Optional[Sequence[float]] = None,
    kind: Union[FitKind, str] = FitKind.SINE,
) -> SingularFit:
    """Least-squares fit of the eps^p ln(eps) / (1 + eps <x0>)^M coefficient of the small-eps resolvent.

    sine: p = m-1, M = m+2, data G(psi1) - G0(psi1).
    cosine: p = m, M = m+3, data G(eps psi0) minus its explicit free part.
    """
    kind = FitKind(kind)
    eps_values = np.asarray(default_fit_grid() if eps_grid is None else eps_grid, dtype=float)
    if eps_values.size < 8 or np.any(eps_values <= 0):
        raise ValueError("eps_grid 需至少 8 个正实数点")
    index = nearest_index(psi1.grid, x0, tol=0.5 * grid_step(psi1.grid))
    m = spec.m
    p, big_m = (m - 1, m + 2) if kind is FitKind.SINE else (m, m + 3)
    smooth_degree = m if kind is FitKind.SINE else m + 1

    data = np.array(map_ordered(lambda e: _fit_sample(spec, psi0, psi1, index, kind, float(e)), list(eps_values)))
    logs = np.log(eps_values)
    scale = float(bracket(x0))
    target = eps_values**p * logs / (1.0 + eps_values * scale) ** big_m
    columns = [target, eps_values ** (p + 1) * logs] + [eps_values**k for k in range(smooth_degree + 1)]
    design = np.column_stack(columns)
    norms = np.linalg.norm(design, axis=0)
    normalised = design / norms
    condition = float(np.linalg.cond(normalised))
    if condition > FIT_CONDITION_LIMIT:
        raise NumericFailure(f"奇异系数拟合病态：条件数 {condition:.2e}", hint="放宽 ε 网格范围")
    beta, *_ = np.linalg.lstsq(normalised, data, rcond=None)
    beta = beta / norms
    fitted = design @ beta
    contribution = np.linalg.norm(beta[0] * target)
    residual = float(np.linalg.norm(fitted - data) / max(contribution, 1e-300))
    logger.debug("奇异系数拟合（%s, x0=%g）：系数 %.6g，残差 %.2e，条件数 %.2e", kind.value, x0, beta[0], residual, condition)
    return SingularFit(
        kind=kind,
        x0=float(x0),
        coefficient=float(beta[0]),
        residual=residual,
        condition=condition,
        eps=tuple(float(e) for e in eps_values),
        samples=tuple(float(d) for d in data),
    )
