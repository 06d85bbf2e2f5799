from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Tuple

from taillab.core.errors import ConfigError
from taillab.potentials.base import Family, PotentialSpec

_COMMON_KEYS = ("m", "x_plus", "x_minus", "well_depth", "well_halfwidth")


def _parse_float(params: Mapping[str, str], key: str, default: float) -> float:
    raw = params.get(key)
    if raw is None or str(raw).strip() == "":
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[potential] {key} 需为数值，当前 {raw!r}") from exc


def parse_sum_terms(raw: str) -> Tuple[Tuple[float, float], ...]:
    """'3:1.0, 4.5:-0.2' -> ((3.0, 1.0), (4.5, -0.2)), pairs of exponent:coefficient."""
    terms = []
    for chunk in str(raw).replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ConfigError(f"sum_terms 项 {chunk!r} 需写成 指数:系数")
        alpha, coeff = chunk.split(":", 1)
        try:
            terms.append((float(alpha), float(coeff)))
        except ValueError as exc:
            raise ConfigError(f"sum_terms 项 {chunk!r} 无法解析") from exc
    return tuple(terms)


def _common(params: Mapping[str, str]) -> dict:
    m = _parse_float(params, "m", 3)
    return {
        "m": int(m) if float(m).is_integer() else m,
        "x_plus": _parse_float(params, "x_plus", 2.0),
        "x_minus": _parse_float(params, "x_minus", -2.0),
        "well_depth": _parse_float(params, "well_depth", 0.0),
        "well_halfwidth": _parse_float(params, "well_halfwidth", 1.0),
    }


def _build_pure(params: Mapping[str, str]) -> PotentialSpec:
    return PotentialSpec(
        family=Family.PURE,
        v_plus=_parse_float(params, "v_plus", 1.0),
        v_minus=_parse_float(params, "v_minus", 1.0),
        **_common(params),
    )


def _build_sum(params: Mapping[str, str]) -> PotentialSpec:
    raw = params.get("sum_terms", "")
    return PotentialSpec(family=Family.SUM, sum_terms=parse_sum_terms(raw), **_common(params))


def _build_correction(params: Mapping[str, str]) -> PotentialSpec:
    if params.get("correction_exponent") in (None, ""):
        raise ConfigError("correction 族需要 correction_exponent")
    return PotentialSpec(
        family=Family.CORRECTION,
        v_plus=_parse_float(params, "v_plus", 1.0),
        v_minus=_parse_float(params, "v_minus", 1.0),
        correction_exponent=_parse_float(params, "correction_exponent", 0.0),
        correction_coefficient=_parse_float(params, "correction_coefficient", 1.0),
        **_common(params),
    )


@dataclass(frozen=True)
class PotentialFamily:
    """A named potential family that builds a PotentialSpec from config values."""

    name: str
    display_name: str
    keys: Tuple[str, ...]
    builder: Callable[[Mapping[str, str]], PotentialSpec]

    def build(self, params: Mapping[str, str]) -> PotentialSpec:
        allowed = set(self.keys) | set(_COMMON_KEYS) | {"family"}
        unknown = sorted(set(params) - allowed)
        if unknown:
            raise ConfigError(f"{self.display_name} 不支持的参数：{', '.join(unknown)}")
        return self.builder(params)


PURE = PotentialFamily(Family.PURE.value, "纯逆幂势", ("v_plus", "v_minus"), _build_pure)
SUM = PotentialFamily(Family.SUM.value, "逆幂和势", ("sum_terms",), _build_sum)
CORRECTION = PotentialFamily(
    Family.CORRECTION.value,
    "逆幂加修正势",
    ("v_plus", "v_minus", "correction_exponent", "correction_coefficient"),
    _build_correction,
)
