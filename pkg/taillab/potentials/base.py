from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Optional, Tuple

from taillab.core.errors import ConfigError


class Side(str, Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Side.PLUS else -1

    def opposite(self) -> "Side":
        return Side.MINUS if self is Side.PLUS else Side.PLUS


class Family(str, Enum):
    PURE = "pure"
    SUM = "sum"
    CORRECTION = "correction"


class PowerTerm(NamedTuple):
    """coefficient * |x|^(-exponent)"""

    coefficient: float
    exponent: float


@dataclass(frozen=True)
class PotentialSpec:
    """An admissible potential: exact inverse-power tails beyond the cutoffs,
    a smoothstep bridge between them and an optional compact well."""

    family: Family = Family.PURE
    m: int = 3
    v_plus: float = 1.0
    v_minus: float = 1.0
    x_plus: float = 2.0
    x_minus: float = -2.0
    # (alpha_k, coefficient) pairs; used by the sum family on both sides
    sum_terms: Tuple[Tuple[float, float], ...] = ()
    correction_exponent: Optional[float] = None
    correction_coefficient: float = 0.0
    well_depth: float = 0.0
    well_halfwidth: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "sum_terms", tuple((float(a), float(c)) for a, c in self.sum_terms))
        if int(self.m) != self.m or self.m < 3:
            raise ConfigError(f"m 必须为不小于 3 的整数，当前 m={self.m}")
        object.__setattr__(self, "m", int(self.m))
        if self.x_plus < 1:
            raise ConfigError(f"x_plus 必须 ≥ 1，当前 {self.x_plus}")
        if self.x_minus > -1:
            raise ConfigError(f"x_minus 必须 ≤ -1，当前 {self.x_minus}")
        if self.family is Family.SUM:
            if not self.sum_terms:
                raise ConfigError("sum 族需要至少一个 sum_terms 项")
            bad = [a for a, _ in self.sum_terms if a <= 2]
            if bad:
                raise ConfigError(f"sum_terms 的指数必须 > 2，发现 {bad}")
        if self.family is Family.CORRECTION:
            if self.correction_exponent is None:
                raise ConfigError("correction 族需要 correction_exponent")
            if self.correction_exponent - self.m <= 3:
                raise ConfigError(
                    f"修正项指数需满足 correction_exponent - m > 3，当前 {self.correction_exponent} - {self.m}"
                )
        if self.well_depth != 0.0:
            limit = min(self.x_plus, -self.x_minus)
            if not (0 < self.well_halfwidth <= limit):
                raise ConfigError(f"well_halfwidth 必须位于 (0, {limit}]，当前 {self.well_halfwidth}")

    @property
    def smoothness(self) -> int:
        """Number of continuous derivatives guaranteed by the construction."""
        return self.m + 2

    def cutoff(self, side: Side) -> float:
        return self.x_plus if side is Side.PLUS else self.x_minus

    def tail_terms(self, side: Side) -> Tuple[PowerTerm, ...]:
        """Exact tail on the given side as a sum of inverse powers of |x|."""
        if self.family is Family.SUM:
            terms = [PowerTerm(c, a) for a, c in self.sum_terms]
        else:
            lead = self.v_plus if side is Side.PLUS else self.v_minus
            terms = [PowerTerm(lead, float(self.m))]
            if self.family is Family.CORRECTION and self.correction_exponent is not None:
                terms.append(PowerTerm(self.correction_coefficient, float(self.correction_exponent)))
        return tuple(t for t in terms if t.coefficient != 0.0)

    def leading_exponent(self) -> float:
        if self.family is Family.SUM:
            return min(a for a, _ in self.sum_terms)
        return float(self.m)

    def leading_coefficient(self, side: Side) -> float:
        if self.family is Family.SUM:
            alpha = self.leading_exponent()
            return sum(c for a, c in self.sum_terms if a == alpha)
        return self.v_plus if side is Side.PLUS else self.v_minus

    def is_free(self) -> bool:
        return not self.tail_terms(Side.PLUS) and not self.tail_terms(Side.MINUS) and self.well_depth == 0.0

    def reflected(self) -> "PotentialSpec":
        """The mirror potential x -> V(-x)."""
        return replace(self, v_plus=self.v_minus, v_minus=self.v_plus, x_plus=-self.x_minus, x_minus=-self.x_plus)


def free_spec(m: int = 3) -> PotentialSpec:
    return PotentialSpec(family=Family.PURE, m=m, v_plus=0.0, v_minus=0.0)
