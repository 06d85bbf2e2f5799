from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import bisect

from taillab.core.logs import get_logger
from taillab.core.workers import map_ordered
from taillab.frequency.jost import Frequency, JostSettings, JostSolution, jost_pair
from taillab.potentials import PotentialSpec, sample

logger = get_logger(__name__)

RESONANCE_THRESHOLD = 1e-6
RICHARDSON_EPS = 1e-4
SCAN_POINTS = 40
SCAN_FLOOR = 1e-2


def wronskian_profile(y_plus: JostSolution, y_minus: JostSolution) -> np.ndarray:
    """y+ y-' - y+' y- on the common grid, written in amplitudes so no exponential is formed."""
    if y_plus.grid.shape != y_minus.grid.shape or not np.array_equal(y_plus.grid, y_minus.grid):
        raise ValueError("y₊ 与 y₋ 的网格不一致")
    if y_plus.epsilon != y_minus.epsilon:
        raise ValueError("y₊ 与 y₋ 的 ε 不一致")
    eps = y_plus.epsilon.value
    ap, am = y_plus.a, y_minus.a
    return ap * y_minus.a_prime - y_plus.a_prime * am + 2.0 * eps * ap * am


def wronskian(y_plus: JostSolution, y_minus: JostSolution) -> complex:
    profile = wronskian_profile(y_plus, y_minus)
    return complex(np.median(profile.real), np.median(profile.imag))


def wronskian_value(
    spec: PotentialSpec,
    eps: Union[Frequency, complex],
    *,
    points: int = 201,
    settings: Optional[JostSettings] = None,
) -> complex:
    """W(eps) from a Jost pair on a small grid spanning [x_minus, x_plus]."""
    grid = np.linspace(spec.x_minus, spec.x_plus, points)
    y_plus, y_minus = jost_pair(spec, eps, grid, settings=settings)
    return wronskian(y_plus, y_minus)


def q3_profile(spec: PotentialSpec, eps_values: Iterable[complex]) -> np.ndarray:
    """q3(eps) = W(eps) - 2 eps."""
    values = [complex(e) for e in eps_values]
    ws = map_ordered(lambda e: wronskian_value(spec, e), values)
    return np.array(ws, dtype=complex) - 2.0 * np.array(values, dtype=complex)


def cauchy_mean(spec: PotentialSpec, center: complex, radius: float, nodes: int = 16) -> complex:
    """Mean of W over a circle; equals W(center) when W is analytic inside."""
    angles = 2.0 * np.pi * np.arange(nodes) / nodes
    points = [complex(center) + radius * np.exp(1j * a) for a in angles]
    return complex(np.mean(map_ordered(lambda e: wronskian_value(spec, e), points)))


class SpectralStatus(str, Enum):
    OK = "ok"
    BOUND_STATE = "bound_state"
    RESONANCE = "resonance"


@dataclass(frozen=True)
class SpectralVerdict:
    status: SpectralStatus
    eps0: Optional[float] = None
    w_zero: complex = 0j
    scan: Tuple[Tuple[float, complex], ...] = field(default=(), compare=False)

    @property
    def ok(self) -> bool:
        return self.status is SpectralStatus.OK

    def describe(self) -> str:
        if self.status is SpectralStatus.BOUND_STATE:
            return f"存在束缚态：ε₀≈{self.eps0:.6g}，本征值 −ε₀²≈{-(self.eps0 or 0.0) ** 2:.6g}"
        if self.status is SpectralStatus.RESONANCE:
            return f"存在零能共振：|W(0)|≈{abs(self.w_zero):.3e}"
        return f"无束缚态且无零能共振，W(0)≈{self.w_zero.real:.6g}"


def scan_upper_limit(spec: PotentialSpec) -> float:
    grid = np.linspace(spec.x_minus, spec.x_plus, 2001)
    depth = max(0.0, float(np.max(-sample(spec, grid))))
    return max(2.0, 1.2 * np.sqrt(depth))


def check_spectral_assumptions(
    spec: PotentialSpec,
    *,
    threshold: float = RESONANCE_THRESHOLD,
    points: int = SCAN_POINTS,
) -> SpectralVerdict:
    """Classify W on real eps: a sign change is a bound state, W(0) ~ 0 a zero-energy resonance.

    V = 0 has W = 2 eps, so it lands on the resonance branch.
    """
    eps_max = scan_upper_limit(spec)
    scan_eps = np.geomspace(SCAN_FLOOR, eps_max, points)
    values: List[complex] = map_ordered(lambda e: wronskian_value(spec, float(e)), list(scan_eps))
    scan = tuple((float(e), complex(w)) for e, w in zip(scan_eps, values))
    logger.debug("谱扫描：%d 个 ε ∈ [%.3g, %.3g]", points, SCAN_FLOOR, eps_max)

    signs = np.sign([w.real for w in values])
    crossings = [i for i in range(points - 1) if signs[i] * signs[i + 1] < 0]
    if crossings:
        i = crossings[-1]
        eps0 = bisect(lambda e: wronskian_value(spec, e).real, scan_eps[i], scan_eps[i + 1], xtol=1e-6)
        logger.info("检测到束缚态：ε₀≈%.6g", eps0)
        return SpectralVerdict(SpectralStatus.BOUND_STATE, float(eps0), 0j, scan)
    if any(w == 0 for w in values):
        eps0 = float(scan_eps[[w == 0 for w in values].index(True)])
        return SpectralVerdict(SpectralStatus.BOUND_STATE, eps0, 0j, scan)

    w_full = wronskian_value(spec, RICHARDSON_EPS)
    w_half = wronskian_value(spec, RICHARDSON_EPS / 2)
    w_zero = 2.0 * w_half - w_full
    if abs(w_zero) < threshold * (1.0 + abs(values[-1])):
        logger.info("检测到零能共振：|W(0)|≈%.3e", abs(w_zero))
        return SpectralVerdict(SpectralStatus.RESONANCE, None, w_zero, scan)
    if np.sign(w_zero.real) != signs[0]:
        # the root lies below the scan floor
        eps0 = _shallow_root(spec, w_zero, w_half)
        logger.info("检测到浅束缚态：ε₀≈%.6g（低于扫描下限 %.3g）", eps0, SCAN_FLOOR)
        return SpectralVerdict(SpectralStatus.BOUND_STATE, eps0, w_zero, scan)
    return SpectralVerdict(SpectralStatus.OK, None, w_zero, scan)


def _shallow_root(spec: PotentialSpec, w_zero: complex, w_half: complex) -> float:
    lo = RICHARDSON_EPS / 2
    if np.sign(w_half.real) == np.sign(w_zero.real):
        return float(bisect(lambda e: wronskian_value(spec, e).real, lo, SCAN_FLOOR, xtol=1e-8))
    # root in [0, lo], where W is linear in eps
    return float(lo * w_zero.real / (w_zero.real - w_half.real))
