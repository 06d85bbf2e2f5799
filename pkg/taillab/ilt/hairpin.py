"""Inverse Laplace transform of branch-cut model terms r eps^p [ln eps] / (1 + eps X)^M.

The Bromwich line is pushed to Re eps = -d. What remains is the integral
along both banks of the cut on [-d, 0] plus an O(e^{-dt}) vertical leg.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import factorial, rgamma

from taillab.core.logs import get_logger
from taillab.ilt.contours import DeformedHairpin

logger = get_logger(__name__)

_LEG_CUTOFF = 1e-16


@dataclass(frozen=True)
class CutModel:
    coefficient: float
    power: float
    log: bool = True
    scale: float = 1.0
    exponent: float = 4.0

    def __post_init__(self) -> None:
        if self.log:
            if self.power < 1:
                raise ValueError(f"对数模型项要求 p >= 1（割线端点可积），当前 p={self.power}")
            if not float(self.power).is_integer():
                raise ValueError(f"对数模型项要求整数 p，当前 p={self.power}")
        elif self.power <= -1:
            raise ValueError(f"幂模型项要求 p > -1，当前 p={self.power}")
        if self.scale <= 0:
            raise ValueError(f"scale 必须 > 0，当前 {self.scale}")
        if self.exponent <= self.power:
            raise ValueError(f"需要 M > p（M={self.exponent}, p={self.power}）")

    @property
    def integer_power(self) -> bool:
        return float(self.power).is_integer()

    def unit_value(self, eps: complex) -> complex:
        """The model with r = 1, principal branch."""
        eps = complex(eps)
        head = eps**self.power
        if self.log:
            head = head * np.log(eps)
        return head / (1.0 + eps * self.scale) ** self.exponent

    def __call__(self, eps: complex) -> complex:
        return self.coefficient * self.unit_value(eps)


def _cut_part(model: CutModel, t: float, depth: float, limit: int) -> float:
    """(1/2 pi i) int over both banks, r = 1."""

    def damping(s: float) -> float:
        return math.exp(-s * t) * (1.0 - s * model.scale) ** (-model.exponent)

    split = min(depth, 60.0 / t)
    if model.integer_power:
        p = int(model.power)
        if not model.log:
            return 0.0
        head, _ = quad(lambda s: damping(s) * s**p, 0.0, split, limit=limit, epsabs=0.0, epsrel=1e-12)
        rest = 0.0
        if split < depth:
            rest, _ = quad(lambda s: damping(s) * s**p, split, depth, limit=limit)
        return -((-1) ** p) * (head + rest)
    p = float(model.power)
    head, _ = quad(damping, 0.0, split, weight="alg", wvar=(p, 0.0), limit=limit, epsabs=0.0, epsrel=1e-12)
    rest = 0.0
    if split < depth:
        rest, _ = quad(lambda s: damping(s) * s**p, split, depth, limit=limit)
    return -math.sin(math.pi * p) / math.pi * (head + rest)


def _vertical_leg(model: CutModel, t: float, depth: float, limit: int) -> float:
    """e^{-dt}/pi int_0^inf Re[e^{iyt} F(-d+iy)] dy, r = 1."""
    cos_part, _ = quad(
        lambda y: model.unit_value(complex(-depth, y)).real, 0.0, np.inf, weight="cos", wvar=t, limlst=200, limit=limit
    )
    sin_part, _ = quad(
        lambda y: model.unit_value(complex(-depth, y)).imag, 0.0, np.inf, weight="sin", wvar=t, limlst=200, limit=limit
    )
    return math.exp(-depth * t) / math.pi * (cos_part - sin_part)


def deformed_cut_integral(model: CutModel, t: float, contour: Optional[DeformedHairpin] = None) -> float:
    if t <= 0:
        raise ValueError(f"t 必须 > 0，当前 {t}")
    if model.coefficient == 0:
        return 0.0
    contour = contour or DeformedHairpin()
    depth = contour.depth_for(model.scale)
    cut = _cut_part(model, t, depth, contour.limit)
    leg = 0.0
    if math.exp(-depth * t) >= _LEG_CUTOFF * max(abs(cut), 1e-300):
        leg = _vertical_leg(model, t, depth, contour.limit)
    logger.debug("hairpin t=%g：割线 %.6e，竖直段 %.3e", t, cut, leg)
    return model.coefficient * (cut + leg)


def watson_leading(model: CutModel, t: float) -> float:
    """Leading large-t value of the inverse transform of model.coefficient * eps^p [ln eps].

    Log terms (integer p >= 1) use L^{-1}[eps^p ln eps](t) = (-1)^{p+1} p! t^{-p-1}, the p-th
    t-derivative of L^{-1}[ln eps](t) = -1/t. Without the logarithm
    L^{-1}[eps^p](t) ~ t^{-p-1} / Gamma(-p), which vanishes for integer p >= 0.
    """
    if t <= 0:
        raise ValueError(f"t 必须 > 0，当前 {t}")
    p = model.power
    if model.log:
        n = int(p)
        return float((-1) ** (n + 1) * factorial(n, exact=True) * model.coefficient * t ** (-n - 1))
    return float(model.coefficient * rgamma(-p) * t ** (-p - 1))
