from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from taillab.core.errors import NumericFailure
from taillab.core.logs import get_logger
from taillab.core.workers import map_ordered
from taillab.frequency.jost import solve_s
from taillab.potentials import PotentialSpec, Side
from taillab.series.dual import reconstruct_s

logger = get_logger(__name__)

MIN_POINTS = 8
MAX_CONDITION = 1e14


class SampleSource(str, Enum):
    SERIES = "series"
    JOST = "jost"


@dataclass(frozen=True)
class HFit:
    x: float
    h1: float
    h2: float
    h3: Optional[float]
    residual: float
    condition: float
    eps_grid: Tuple[float, ...]
    coefficients: Dict[str, float] = field(default_factory=dict)


def h_limits(spec: PotentialSpec, x: float) -> Tuple[float, float]:
    """Large-x behaviour of (h1, h2): -v (-2)^{m-2} / Gamma(m) and v (-2)^{m-1} x / Gamma(m)."""
    m = spec.m
    v = spec.leading_coefficient(Side.PLUS)
    return -v * (-2.0) ** (m - 2) / math.gamma(m), v * (-2.0) ** (m - 1) * x / math.gamma(m)


def default_eps_grid(x: float, points: int = 10) -> np.ndarray:
    return np.geomspace(1e-4 / x, 0.1 / x, points)


def basis_columns(m: int, eps: np.ndarray) -> Tuple[List[str], np.ndarray]:
    log_eps = np.log(eps)
    names = [f"eps^{m - 2} ln", f"eps^{m - 1} ln"]
    cols = [eps ** (m - 2) * log_eps, eps ** (m - 1) * log_eps]
    if m == 3:
        names.append("eps^2 ln^2")
        cols.append(eps**2 * log_eps**2)
    for p in sorted({0, 1, m - 2, m - 1}):
        names.append(f"eps^{p}")
        cols.append(eps**p)
    return names, np.stack(cols, axis=1)


def _sample(spec: PotentialSpec, x: float, source: SampleSource):
    def one(eps: float) -> float:
        if source is SampleSource.JOST:
            return float(solve_s(spec, eps, Side.PLUS, np.array([x])).s[0].real)
        return float(reconstruct_s(spec, eps, x).real)

    return one


def extract_h_coefficients(
    spec: PotentialSpec,
    x: float,
    eps_grid: Optional[Sequence[float]] = None,
    *,
    source: SampleSource = SampleSource.SERIES,
) -> HFit:
    """Least-squares fit of s(x; eps) on a log-spaced eps grid.

    Basis: eps^{m-2} ln eps, eps^{m-1} ln eps, eps^2 ln^2 eps (m = 3), and the
    smooth powers 1, eps, eps^{m-2}, eps^{m-1}.
    """
    source = SampleSource(source)
    eps = default_eps_grid(x) if eps_grid is None else np.asarray(eps_grid, dtype=float)
    if eps.size < MIN_POINTS:
        raise ValueError(f"eps_grid 至少需要 {MIN_POINTS} 个点，当前 {eps.size}")
    if np.any(eps <= 0) or np.any(eps * x >= 1.0):
        raise ValueError("eps_grid 必须位于 (0, 1/x) 内")
    s_values = np.array(map_ordered(_sample(spec, x, source), list(eps)))

    names, design = basis_columns(spec.m, eps)
    norms = np.max(np.abs(design), axis=0)
    scaled = design / norms
    condition = float(np.linalg.cond(scaled))
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise NumericFailure(f"h 系数拟合病态（条件数 {condition:.2e}）", hint="加宽 eps_grid")
    solution, *_ = np.linalg.lstsq(scaled, s_values, rcond=None)
    coeffs = solution / norms
    fitted = design @ coeffs
    residual = float(np.max(np.abs(fitted - s_values)) / max(float(np.max(np.abs(s_values))), 1e-300))
    table = dict(zip(names, (float(c) for c in coeffs)))
    h3 = table.get("eps^2 ln^2")
    logger.info(
        "h 系数拟合 x=%g：h1=%.6g h2=%.6g%s，残差 %.2e，条件数 %.2e",
        x,
        coeffs[0],
        coeffs[1],
        "" if h3 is None else f" h3={h3:.6g}",
        residual,
        condition,
    )
    return HFit(float(x), float(coeffs[0]), float(coeffs[1]), h3, residual, condition, tuple(float(e) for e in eps), table)
