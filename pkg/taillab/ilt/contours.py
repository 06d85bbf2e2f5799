from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

MIN_DEGREE = 32
HAIRPIN_DEPTH = 0.5


class QuadratureRule(str, Enum):
    TRAPEZOID = "trapezoid"
    FOURIER = "fourier"


@dataclass(frozen=True)
class VerticalLine:
    """Bromwich line Re eps = const.

    trapezoid: 2*degree+1 nodes gamma + i*pi*k/T, gamma = shift - ln(tol)/(2T);
    fourier: oscillatory quadrature on Re eps = shift (default min(0.1, 1/t)).
    """

    shift: Optional[float] = None
    rule: QuadratureRule = QuadratureRule.TRAPEZOID
    degree: int = MIN_DEGREE
    tol: float = 1e-9
    max_degree: int = 48
    adaptive: bool = True
    real_output: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "rule", QuadratureRule(self.rule))
        if self.shift is not None and self.shift < 0:
            raise ValueError(f"shift 必须 >= 0，当前 {self.shift}")
        if self.degree < MIN_DEGREE:
            raise ValueError(f"degree 至少为 {MIN_DEGREE}（节点数 >= 64），当前 {self.degree}")
        if self.max_degree < self.degree:
            raise ValueError("max_degree 不能小于 degree")
        if not 0.0 < self.tol < 1.0:
            raise ValueError(f"tol 必须在 (0, 1) 内，当前 {self.tol}")
        if self.rule is QuadratureRule.FOURIER and not self.real_output:
            raise ValueError("fourier 规则只支持实值输出")

    @property
    def nodes(self) -> int:
        return 2 * self.degree + 1

    def fourier_shift(self, t: float) -> float:
        if self.shift is not None and self.shift > 0:
            return float(self.shift)
        return min(0.1, 1.0 / t)


@dataclass(frozen=True)
class DeformedHairpin:
    """Vertical leg Re eps = -d plus both banks of the cut on [-d, 0]."""

    depth: float = HAIRPIN_DEPTH
    limit: int = 400

    def __post_init__(self) -> None:
        if not 0.0 < self.depth <= HAIRPIN_DEPTH:
            raise ValueError(f"depth 必须在 (0, {HAIRPIN_DEPTH}] 内，当前 {self.depth}")
        if self.limit < 64:
            raise ValueError("limit 至少为 64")

    def depth_for(self, scale: float) -> float:
        """Keeps the model pole at -1/scale left of the vertical leg."""
        return min(self.depth, 0.5 / scale)
