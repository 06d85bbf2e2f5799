"""Jost solutions y+- of y'' = (V + eps^2) y.

The stored unknown is the amplitude a with y+ = exp(-eps x) a+ and
y- = exp(eps x) a-, so s = a - 1. On the exact-tail side a is the fixed
point of a = 1 + S[a] with

    U(x) = int_x^inf exp(-2 eps (t - x)) V(t) a(t) dt,   s' = -U,   s = int_x^inf U,

computed by exponential product integration on a grid of doubling octaves.
Beyond the last octave s is replaced by its first Picard term, which has a
closed form through generalized exponential integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from taillab.core.env_loader import get_env_float, get_env_int
from taillab.core.errors import NumericFailure
from taillab.core.grids import EDGE, bracket, grid_step, stencil_derivative
from taillab.core.logs import get_logger
from taillab.core.quadrature import exp_cumulative_right
from taillab.frequency.specfun import zero_energy_anchor
from taillab.potentials import PotentialSpec, PowerTerm, Side, sample

logger = get_logger(__name__)

X_INF_FLOOR = 50.0
X_INF_CAP = 1e5
CELLS_PER_OCTAVE = 128
ANCHOR_THRESHOLD = 0.10
GROWTH_STREAK = 3
_MAX_RELATIVE_STEP = 1.0 / 64


@dataclass(frozen=True)
class Frequency:
    """Laplace dual variable with Re eps >= 0, eps != 0; log is the principal branch."""

    value: complex

    def __post_init__(self) -> None:
        value = complex(self.value)
        if value == 0:
            raise ValueError("ε 不能为 0（零频请使用零能锚点）")
        if value.real < -1e-14 * abs(value):
            raise ValueError(f"ε 必须位于闭右半平面，当前 ε={value}")
        object.__setattr__(self, "value", value)

    @classmethod
    def of(cls, eps: Union["Frequency", complex, float]) -> "Frequency":
        return eps if isinstance(eps, Frequency) else cls(complex(eps))

    def log(self) -> complex:
        return complex(np.log(self.value))

    def conjugate(self) -> "Frequency":
        return Frequency(self.value.conjugate())

    def __abs__(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class JostSettings:
    tol_tail: float = 1e-10
    tol_fixed_point: float = 1e-12
    max_iter: int = 400
    cells_per_octave: int = CELLS_PER_OCTAVE

    @classmethod
    def from_env(cls) -> "JostSettings":
        return cls(
            tol_tail=get_env_float("TAILLAB_TOL_TAIL", 1e-10),
            tol_fixed_point=get_env_float("TAILLAB_TOL_FIXED_POINT", 1e-12),
            max_iter=get_env_int("TAILLAB_MAX_PICARD", 400),
        )


@dataclass(frozen=True)
class JostDiagnostics:
    iterations: int = 0
    last_increment: float = 0.0
    x_infinity: float = 0.0
    tail_value: float = 0.0
    contraction_estimate: float = 0.0
    anchor_deviation: Optional[float] = None
    anchor_flagged: bool = False
    extended: bool = False


@dataclass(frozen=True)
class JostSolution:
    side: Side
    epsilon: Frequency
    grid: np.ndarray
    a: np.ndarray
    a_prime: np.ndarray
    diagnostics: JostDiagnostics = field(default_factory=JostDiagnostics, compare=False)

    @property
    def sigma(self) -> int:
        """Exponent sign: y = exp(sigma eps x) a."""
        return -1 if self.side is Side.PLUS else 1

    def _phase(self) -> np.ndarray:
        return np.exp(self.sigma * self.epsilon.value * self.grid)

    @property
    def s(self) -> np.ndarray:
        return self.a - 1.0

    @property
    def s_prime(self) -> np.ndarray:
        return self.a_prime

    @property
    def y(self) -> np.ndarray:
        return self._phase() * self.a

    @property
    def y_prime(self) -> np.ndarray:
        return self._phase() * (self.a_prime + self.sigma * self.epsilon.value * self.a)

    def log_scale(self) -> np.ndarray:
        """log |exp(sigma eps x)| without forming the exponential."""
        return self.sigma * self.epsilon.value.real * self.grid

    def restricted(self, mask: np.ndarray) -> "JostSolution":
        return replace(self, grid=self.grid[mask], a=self.a[mask], a_prime=self.a_prime[mask])


def _tail_integrals(terms: Sequence[PowerTerm], eps: complex, x: float) -> Tuple[complex, complex]:
    """Closed forms with a = 1: (U_inf(x), s_inf(x)) for sum c t^(-alpha), x > 0."""
    if not terms:
        return 0j, 0j
    with mpmath.workdps(40):
        xm = mpmath.mpf(x)
        e2 = 2 * mpmath.mpc(eps)
        z = e2 * xm
        u_total = mpmath.mpc(0)
        s_total = mpmath.mpc(0)
        for term in terms:
            alpha = mpmath.mpf(term.exponent)
            power = xm ** (1 - alpha)
            scaled = mpmath.exp(z) * mpmath.expint(alpha, z)
            u_total += term.coefficient * power * scaled
            s_total += term.coefficient * (power / (alpha - 1) - power * scaled)
        return complex(u_total), complex(s_total / e2)


def first_picard_term(spec: PotentialSpec, eps: Union[Frequency, complex], x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(T1, T1') on the plus tail: the first Picard iterate started from a = 1."""
    freq = Frequency.of(eps)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < spec.x_plus * (1 - 1e-12)):
        raise ValueError(f"first_picard_term 只在 x ≥ x_plus={spec.x_plus} 上有闭式")
    terms = spec.tail_terms(Side.PLUS)
    pairs = [_tail_integrals(terms, freq.value, float(xi)) for xi in xs]
    u = np.array([p[0] for p in pairs], dtype=complex)
    s = np.array([p[1] for p in pairs], dtype=complex)
    return s, -u


def truncation_point(spec: PotentialSpec, tol_tail: float) -> float:
    alpha = spec.leading_exponent()
    x_inf = spec.x_plus * tol_tail ** (-1.0 / (2.0 * alpha - 4.0))
    return float(min(max(x_inf, X_INF_FLOOR * spec.x_plus), X_INF_CAP))


def contraction_estimate(spec: PotentialSpec) -> float:
    """Small-eps bound on the Picard map: |v| x_plus^(2-m) / ((m-1)(m-2)), summed over tail terms."""
    return float(
        sum(
            abs(t.coefficient) * spec.x_plus ** (2.0 - t.exponent) / ((t.exponent - 1.0) * (t.exponent - 2.0))
            for t in spec.tail_terms(Side.PLUS)
        )
    )


def _is_fine_uniform(grid: np.ndarray) -> bool:
    if grid.size < 4:
        return False
    try:
        h = grid_step(grid)
    except ValueError:
        return False
    return h <= _MAX_RELATIVE_STEP * grid[0]


def _solver_segments(tail: np.ndarray, x_inf: float, cells: int) -> Tuple[List[np.ndarray], bool]:
    """Segment 0 covers the requested tail points, then doubling octaves out past x_inf."""
    segments: List[np.ndarray] = []
    internal = False
    if tail.size > 1:
        if _is_fine_uniform(tail):
            segments.append(tail)
        else:
            length = tail[-1] - tail[0]
            h_max = min(float(np.min(np.diff(tail))), _MAX_RELATIVE_STEP * tail[0])
            n = max(4, int(np.ceil(length / h_max)))
            segments.append(np.linspace(tail[0], tail[-1], n + 1))
            internal = True
    start = float(tail[-1])
    while start < x_inf:
        segments.append(np.linspace(start, 2.0 * start, cells + 1))
        start *= 2.0
    if not segments:
        segments.append(np.linspace(start, 2.0 * start, cells + 1))
    return segments, internal


def _hermite(x: np.ndarray, y: np.ndarray, dy: np.ndarray, at: np.ndarray) -> np.ndarray:
    real = CubicHermiteSpline(x, y.real, dy.real)(at)
    imag = CubicHermiteSpline(x, y.imag, dy.imag)(at)
    return real + 1j * imag


def _picard_tail(
    spec: PotentialSpec, eps: complex, tail: np.ndarray, settings: JostSettings
) -> Tuple[np.ndarray, np.ndarray, JostDiagnostics]:
    terms = spec.tail_terms(Side.PLUS)
    x_inf = max(truncation_point(spec, settings.tol_tail), float(tail[-1]))
    segments, internal = _solver_segments(tail, x_inf, settings.cells_per_octave)
    potentials = [sample(spec, seg) for seg in segments]
    steps = [float(seg[1] - seg[0]) for seg in segments]
    amplitudes = [np.ones(seg.size, dtype=complex) for seg in segments]
    fluxes = [np.zeros(seg.size, dtype=complex) for seg in segments]
    u_far, s_far = _tail_integrals(terms, eps, float(segments[-1][-1]))

    history: List[float] = []
    streak = 0
    increment = np.inf
    iterations = 0
    for iterations in range(1, settings.max_iter + 1):
        u_seed, s_seed = u_far, s_far
        new_amplitudes: List[np.ndarray] = [np.empty(0)] * len(segments)
        for k in range(len(segments) - 1, -1, -1):
            flux = exp_cumulative_right(potentials[k] * amplitudes[k], steps[k], 2.0 * eps, tail=u_seed)
            s_vals = exp_cumulative_right(flux, steps[k], 0.0, tail=s_seed)
            new_amplitudes[k] = 1.0 + s_vals
            fluxes[k] = flux
            u_seed, s_seed = flux[0], s_vals[0]
        increment = max(float(np.max(np.abs(new - old))) for new, old in zip(new_amplitudes, amplitudes))
        amplitudes = new_amplitudes
        logger.debug("Picard 迭代 %d：增量 %.3e", iterations, increment)
        if increment < settings.tol_fixed_point:
            break
        if history and increment > history[-1]:
            streak += 1
            if streak >= GROWTH_STREAK:
                raise NumericFailure(
                    f"Picard 迭代不收缩：连续 {GROWTH_STREAK} 次增量增长（ε={eps}，增量 {increment:.3e}）",
                    hint="增大 X∞ 或 x_plus",
                )
        else:
            streak = 0
        history.append(increment)
    else:
        raise NumericFailure(
            f"Picard 迭代 {settings.max_iter} 次后仍未收敛（ε={eps}，增量 {increment:.3e}）",
            hint="增大 X∞ 或提高 TAILLAB_MAX_PICARD",
        )

    seg0, a0, u0 = segments[0], amplitudes[0], fluxes[0]
    if tail.size == 1:
        a_out, ap_out = a0[:1], -u0[:1]
    elif internal:
        # a'' comes from the equation itself
        app = 2.0 * eps * (-u0) + potentials[0] * a0
        a_out = _hermite(seg0, a0, -u0, tail)
        ap_out = _hermite(seg0, -u0, app, tail)
    else:
        a_out, ap_out = a0, -u0
    diagnostics = JostDiagnostics(
        iterations=iterations,
        last_increment=float(increment),
        x_infinity=float(segments[-1][-1]),
        tail_value=abs(s_far),
        contraction_estimate=contraction_estimate(spec),
    )
    return np.asarray(a_out, dtype=complex), np.asarray(ap_out, dtype=complex), diagnostics


def _anchor_check(spec: PotentialSpec, sol: JostSolution, freq: Frequency) -> JostDiagnostics:
    """Small-eps cross-check y+ ~ r(eps) Phi1 on the plus tail: the ratio must stay flat."""
    v = spec.leading_coefficient(Side.PLUS)
    if abs(freq) >= 1e-3 / spec.x_plus or v <= 0 or spec.tail_terms(Side.PLUS) == ():
        return sol.diagnostics
    mask = sol.grid >= spec.x_plus * (1 - 1e-12)
    x = sol.grid[mask]
    anchor = zero_energy_anchor(spec.m, v, x)
    ratio = sol.y[mask] / anchor
    deviation = float(np.max(np.abs(ratio / ratio[0] - 1.0)))
    flagged = deviation > ANCHOR_THRESHOLD
    if flagged:
        logger.warning("小 ε 锚点偏差 %.1f%% 超过 %.0f%%（ε=%s）", 100 * deviation, 100 * ANCHOR_THRESHOLD, freq.value)
    return replace(sol.diagnostics, anchor_deviation=deviation, anchor_flagged=flagged)


def _plus_tail(spec: PotentialSpec, freq: Frequency, grid: np.ndarray, settings: JostSettings) -> JostSolution:
    tail = grid[grid >= spec.x_plus * (1 - 1e-12)]
    if tail.size == 0:
        raise ValueError(f"网格必须伸入精确尾部区域 x ≥ x_plus={spec.x_plus}")
    a, ap, diagnostics = _picard_tail(spec, freq.value, tail, settings)
    return JostSolution(Side.PLUS, freq, tail, a, ap, diagnostics)


def solve_s(
    spec: PotentialSpec,
    eps: Union[Frequency, complex],
    side: Side,
    grid: np.ndarray,
    *,
    settings: Optional[JostSettings] = None,
) -> JostSolution:
    """Jost solution on the given side; grid points outside the exact tail are reached by extend_to_line."""
    freq = Frequency.of(eps)
    side = Side(side)
    settings = settings or JostSettings.from_env()
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid 必须为严格递增的一维数组")

    if side is Side.PLUS:
        sol = _plus_tail(spec, freq, grid, settings)
        sol = replace(sol, diagnostics=_anchor_check(spec, sol, freq))
    else:
        mirror = spec.reflected()
        mirrored = _plus_tail(mirror, freq, -grid[::-1], settings)
        mirrored = replace(mirrored, diagnostics=_anchor_check(mirror, mirrored, freq))
        sol = JostSolution(
            Side.MINUS,
            freq,
            -mirrored.grid[::-1],
            mirrored.a[::-1].copy(),
            -mirrored.a_prime[::-1],
            mirrored.diagnostics,
        )
    if sol.grid.size < grid.size:
        sol = extend_to_line(sol, spec, grid)
    return sol


def extend_to_line(j: JostSolution, spec: PotentialSpec, full_grid: np.ndarray) -> JostSolution:
    """Continue (a, a') across the middle region and the opposite tail.

    a'' = -2 sigma eps a' + V a is integrated away from the tail with DOP853;
    j.grid must be a suffix (plus side) or prefix (minus side) of full_grid.
    """
    full_grid = np.asarray(full_grid, dtype=float)
    n = j.grid.size
    if j.side is Side.PLUS:
        if n > full_grid.size or not np.array_equal(full_grid[full_grid.size - n :], j.grid):
            raise ValueError("y₊ 的网格必须是完整网格的尾段")
        targets = full_grid[: full_grid.size - n][::-1]
        start = 0
    else:
        if n > full_grid.size or not np.array_equal(full_grid[:n], j.grid):
            raise ValueError("y₋ 的网格必须是完整网格的首段")
        targets = full_grid[n:]
        start = -1
    if targets.size == 0:
        return j

    eps = j.epsilon.value
    drift = -2.0 * j.sigma * eps
    x0 = float(j.grid[start])

    def rhs(x: float, state: np.ndarray) -> np.ndarray:
        pot = float(sample(spec, np.array([x]))[0])
        return np.array([state[1], drift * state[1] + pot * state[0]])

    state0 = np.array([j.a[start], j.a_prime[start]], dtype=complex)
    result = solve_ivp(
        rhs,
        (x0, float(targets[-1])),
        state0,
        method="DOP853",
        t_eval=targets,
        rtol=1e-10,
        atol=1e-12,
    )
    if not result.success or result.y.shape[1] != targets.size:
        raise NumericFailure(f"Jost 解延拓失败（ε={eps}）：{result.message}", hint="减小网格范围或检查势函数")

    a_ext, ap_ext = result.y[0], result.y[1]
    if j.side is Side.PLUS:
        a = np.concatenate([a_ext[::-1], j.a])
        ap = np.concatenate([ap_ext[::-1], j.a_prime])
    else:
        a = np.concatenate([j.a, a_ext])
        ap = np.concatenate([j.a_prime, ap_ext])
    return JostSolution(j.side, j.epsilon, full_grid, a, ap, replace(j.diagnostics, extended=True))


def jost_pair(
    spec: PotentialSpec,
    eps: Union[Frequency, complex],
    grid: np.ndarray,
    *,
    settings: Optional[JostSettings] = None,
) -> Tuple[JostSolution, JostSolution]:
    """(y+, y-) on a common grid; the grid must reach both exact tails."""
    grid = np.asarray(grid, dtype=float)
    if grid[0] > spec.x_minus or grid[-1] < spec.x_plus:
        raise ValueError(f"网格需覆盖 [x_minus, x_plus] = [{spec.x_minus}, {spec.x_plus}]")
    freq = Frequency.of(eps)
    return (
        solve_s(spec, freq, Side.PLUS, grid, settings=settings),
        solve_s(spec, freq, Side.MINUS, grid, settings=settings),
    )


def residual(j: JostSolution, spec: PotentialSpec) -> np.ndarray:
    """|y'' - (V + eps^2) y| / max|y| on a uniform grid; the EDGE points at each end are zero."""
    h = grid_step(j.grid)
    eps = j.epsilon.value
    app = stencil_derivative(j.a_prime, h)
    raw = np.abs(app + 2.0 * j.sigma * eps * j.a_prime - sample(spec, j.grid) * j.a)
    log_scale = j.log_scale()
    log_max = float(np.max(log_scale + np.log(np.abs(j.a) + 1e-300)))
    out = raw * np.exp(log_scale - log_max)
    out[:EDGE] = 0.0
    out[-EDGE:] = 0.0
    return out


@dataclass(frozen=True)
class DerivativeEstimate:
    order: int
    value: complex
    scaled: float


def epsilon_derivative_bound(
    spec: PotentialSpec,
    eps: Union[Frequency, complex],
    x: float,
    order: int = 1,
    *,
    settings: Optional[JostSettings] = None,
) -> DerivativeEstimate:
    """Central-difference |d^k s / d eps^k| at fixed x, scaled by |eps|^k (|eps|<x>+1)<x>^(m-2)."""
    if order not in (1, 2):
        raise ValueError(f"order 只支持 1 或 2，当前 {order}")
    freq = Frequency.of(eps)
    # step along eps itself so eps - delta stays in the half-plane
    delta = 1e-3 * freq.value
    grid = np.array([float(x)])

    def s_at(e: complex) -> complex:
        return complex(solve_s(spec, e, Side.PLUS, grid, settings=settings).s[0])

    plus, minus = s_at(freq.value + delta), s_at(freq.value - delta)
    if order == 1:
        value = (plus - minus) / (2.0 * delta)
    else:
        value = (plus - 2.0 * s_at(freq.value) + minus) / delta**2
    bx = float(bracket(x))
    scaled = abs(value) * abs(freq) ** order * (abs(freq) * bx + 1.0) * bx ** (spec.leading_exponent() - 2.0)
    return DerivativeEstimate(order, complex(value), float(scaled))
