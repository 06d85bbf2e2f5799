"""INI experiment files resolved into an immutable ExperimentConfig.

Grammar and defaults are documented in docs/CONFIG.md.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Tuple

from taillab.core.errors import ConfigError
from taillab.potentials import PotentialSpec, build_potential
from taillab.timedomain import Bump, Gaussian, InitialProfile, RandomBumps, Zero, support_radius

STAGES = ("spectral", "series", "ilt", "simulate", "decay")
STAGE_DEPENDENCIES: Dict[str, Tuple[str, ...]] = {
    "spectral": (),
    "series": (),
    "ilt": ("spectral",),
    "simulate": (),
    "decay": ("simulate", "spectral"),
}
# numeric keys without a default that a stage cannot run without
STAGE_REQUIRED_KEYS: Dict[str, Tuple[str, ...]] = {
    "spectral": (),
    "series": ("series_eps", "series_x"),
    "ilt": ("ilt_times",),
    "simulate": ("final_time",),
    "decay": ("final_time",),
}

SECTIONS = ("potential", "initial_data", "pipeline", "numeric", "output")
INITIAL_KEYS = ("kind", "which", "center", "width", "amplitude", "seed")
PIPELINE_KEYS = ("stages",)
OUTPUT_KEYS = ("dir",)
NUMERIC_KEYS = (
    "h",
    "courant",
    "final_time",
    "half_width",
    "recorders",
    "record_every",
    "energy_every",
    "fit_window",
    "amplitude_window",
    "exponent_tolerance",
    "ilt_times",
    "ilt_h",
    "ilt_t_switch",
    "series_eps",
    "series_x",
    "dual_q",
)
KINDS = ("bump", "gaussian", "random")
WHICH = ("psi0", "psi1")


def _float(section: str, params: Mapping[str, str], key: str, default: Optional[float] = None) -> Optional[float]:
    raw = params.get(key)
    if raw is None or not str(raw).strip():
        return default
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} 需为数值，当前 {raw!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key} 必须为有限数，当前 {raw!r}")
    return value


def _int(section: str, params: Mapping[str, str], key: str, default: int) -> int:
    value = _float(section, params, key, float(default))
    if value is None or not float(value).is_integer():
        raise ConfigError(f"[{section}] {key} 需为整数，当前 {params.get(key)!r}")
    return int(value)


def _floats(section: str, params: Mapping[str, str], key: str) -> Tuple[float, ...]:
    raw = params.get(key)
    if raw is None or not str(raw).strip():
        return ()
    out = []
    for chunk in str(raw).replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            out.append(float(chunk))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} 中的 {chunk!r} 不是数值") from exc
    return tuple(out)


def _window(params: Mapping[str, str], key: str) -> Optional[Tuple[float, float]]:
    values = _floats("numeric", params, key)
    if not values:
        return None
    if len(values) != 2 or not 0 < values[0] < values[1]:
        raise ConfigError(f"[numeric] {key} 需写成 lo, hi 且 0 < lo < hi，当前 {params.get(key)!r}")
    return values[0], values[1]


def _reject_unknown(section: str, params: Mapping[str, str], allowed: Iterable[str]) -> None:
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ConfigError(f"[{section}] 不支持的键：{', '.join(unknown)}")


@dataclass(frozen=True)
class InitialDataConfig:
    kind: str = "bump"
    which: str = "psi1"
    center: float = 0.0
    width: float = 1.5
    amplitude: float = 1.0
    seed: int = 0

    def profile(self) -> InitialProfile:
        if self.kind == "gaussian":
            return Gaussian(self.center, self.width, self.amplitude)
        if self.kind == "random":
            return RandomBumps(self.seed, self.center, self.width)
        return Bump(self.center, self.width, self.amplitude)

    def pair(self) -> Tuple[InitialProfile, InitialProfile]:
        """(psi0, psi1); the profile sits in the slot named by `which`."""
        profile = self.profile()
        return (profile, Zero()) if self.which == "psi0" else (Zero(), profile)

    @property
    def support(self) -> float:
        return support_radius(self.profile())


@dataclass(frozen=True)
class NumericConfig:
    h: float = 0.05
    courant: float = 0.5
    final_time: Optional[float] = None
    half_width: Optional[float] = None
    recorders: Tuple[float, ...] = (0.0,)
    record_every: int = 1
    energy_every: int = 50
    fit_window: Optional[Tuple[float, float]] = None
    amplitude_window: Optional[Tuple[float, float]] = None
    exponent_tolerance: float = 0.25
    ilt_times: Tuple[float, ...] = ()
    ilt_h: float = 0.02
    ilt_t_switch: Optional[float] = None
    series_eps: Optional[float] = None
    series_x: Optional[float] = None
    dual_q: Tuple[float, ...] = (0.5, 1.0, 2.0, 4.0, 8.0)

    @property
    def k(self) -> float:
        return self.courant * self.h

    def domain_half_width(self, support: float) -> float:
        """Configured L, or the smallest multiple of h beyond support + T + 2."""
        if self.half_width is not None:
            return self.half_width
        reach = support + (self.final_time or 0.0) + 2.0
        return self.h * math.ceil(reach / self.h)


@dataclass(frozen=True)
class ExperimentConfig:
    potential: PotentialSpec
    initial_data: InitialDataConfig
    stages: Tuple[str, ...]
    numeric: NumericConfig
    output_dir: Path
    source: str = "<string>"
    requested: Tuple[str, ...] = field(default=(), compare=False)

    def flat(self) -> Dict[str, object]:
        """section.key -> value for the run record; the potential is recorded as resolved."""
        out: Dict[str, object] = {"config.source": self.source}
        for spec_field in fields(self.potential):
            out[f"potential.{spec_field.name}"] = _record_value(getattr(self.potential, spec_field.name))
        for key in INITIAL_KEYS:
            out[f"initial_data.{key}"] = _record_value(getattr(self.initial_data, key))
        out["pipeline.stages"] = ",".join(self.stages)
        for key in NUMERIC_KEYS:
            out[f"numeric.{key}"] = _record_value(getattr(self.numeric, key))
        out["output.dir"] = str(self.output_dir)
        return out


def _record_value(value: object) -> object:
    # floats stay numeric so the record writer applies its own precision
    if value is None:
        return ""
    if isinstance(value, float):
        return value
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, tuple):
        # sum_terms pairs are written back in their config form a:c
        items = (":".join(f"{v:g}" for v in item) if isinstance(item, tuple) else f"{item:g}" for item in value)
        return ",".join(items)
    return str(value)


def resolve_stages(raw: str) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """(stages to run in dependency order, stages as requested)."""
    names = [s.strip().lower() for s in str(raw).replace(";", ",").split(",") if s.strip()]
    if not names:
        raise ConfigError("[pipeline] stages 为空：至少需要一个阶段", hint=f"可选：{', '.join(STAGES)} 或 all")
    if "all" in names:
        names = list(STAGES)
    unknown = [n for n in names if n not in STAGES]
    if unknown:
        raise ConfigError(f"[pipeline] 未知阶段：{', '.join(unknown)}（可选：{', '.join(STAGES)}）")
    wanted = set()
    pending = list(names)
    while pending:
        name = pending.pop()
        if name not in wanted:
            wanted.add(name)
            pending.extend(STAGE_DEPENDENCIES[name])
    return tuple(s for s in STAGES if s in wanted), tuple(names)


def _initial_data(params: Mapping[str, str]) -> InitialDataConfig:
    _reject_unknown("initial_data", params, INITIAL_KEYS)
    kind = str(params.get("kind", "bump")).strip().lower() or "bump"
    which = str(params.get("which", "psi1")).strip().lower() or "psi1"
    if kind not in KINDS:
        raise ConfigError(f"[initial_data] kind 必须为 {'/'.join(KINDS)}，当前 {kind!r}")
    if which not in WHICH:
        raise ConfigError(f"[initial_data] which 必须为 {'/'.join(WHICH)}，当前 {which!r}")
    width = _float("initial_data", params, "width", 1.5)
    if width is None or width <= 0:
        raise ConfigError(f"[initial_data] width 必须 > 0，当前 {width}")
    return InitialDataConfig(
        kind=kind,
        which=which,
        center=_float("initial_data", params, "center", 0.0) or 0.0,
        width=width,
        amplitude=_float("initial_data", params, "amplitude", 1.0),
        seed=_int("initial_data", params, "seed", 0),
    )


def _numeric(params: Mapping[str, str]) -> NumericConfig:
    _reject_unknown("numeric", params, NUMERIC_KEYS)
    defaults = NumericConfig()
    numeric = NumericConfig(
        h=_float("numeric", params, "h", defaults.h),
        courant=_float("numeric", params, "courant", defaults.courant),
        final_time=_float("numeric", params, "final_time"),
        half_width=_float("numeric", params, "half_width"),
        recorders=_floats("numeric", params, "recorders") or defaults.recorders,
        record_every=_int("numeric", params, "record_every", defaults.record_every),
        energy_every=_int("numeric", params, "energy_every", defaults.energy_every),
        fit_window=_window(params, "fit_window"),
        amplitude_window=_window(params, "amplitude_window"),
        exponent_tolerance=_float("numeric", params, "exponent_tolerance", defaults.exponent_tolerance),
        ilt_times=_floats("numeric", params, "ilt_times"),
        ilt_h=_float("numeric", params, "ilt_h", defaults.ilt_h),
        ilt_t_switch=_float("numeric", params, "ilt_t_switch"),
        series_eps=_float("numeric", params, "series_eps"),
        series_x=_float("numeric", params, "series_x"),
        dual_q=_floats("numeric", params, "dual_q") or defaults.dual_q,
    )
    if numeric.h <= 0 or numeric.ilt_h <= 0:
        raise ConfigError(f"[numeric] h、ilt_h 必须 > 0（h={numeric.h}, ilt_h={numeric.ilt_h}）")
    if not 0 < numeric.courant < 1:
        raise ConfigError(f"[numeric] courant 必须位于 (0, 1)，当前 {numeric.courant}")
    if numeric.final_time is not None and numeric.final_time <= 0:
        raise ConfigError(f"[numeric] final_time 必须 > 0，当前 {numeric.final_time}")
    if any(t <= 0 for t in numeric.ilt_times):
        raise ConfigError("[numeric] ilt_times 必须全部 > 0")
    if numeric.exponent_tolerance <= 0:
        raise ConfigError("[numeric] exponent_tolerance 必须 > 0")
    return numeric


def check_required(stages: Tuple[str, ...], numeric: NumericConfig) -> None:
    for stage in stages:
        missing = [key for key in STAGE_REQUIRED_KEYS[stage] if getattr(numeric, key) in (None, ())]
        if missing:
            raise ConfigError(f"阶段 {stage} 缺少 [numeric] 键：{', '.join(missing)}")


def _check_writable(path: Path) -> None:
    existing = path
    while not existing.exists():
        if existing.parent == existing:
            break
        existing = existing.parent
    if existing.exists() and not existing.is_dir():
        raise ConfigError(f"输出路径 {path} 被同名文件占用（{existing}）")
    if not os.access(existing, os.W_OK):
        raise ConfigError(f"输出目录不可写：{path}")


def parse_config(text: str, *, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"配置文件 {source} 解析失败：{exc}") from exc
    unknown = sorted(set(parser.sections()) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"未知配置节：{', '.join(unknown)}（可选：{', '.join(SECTIONS)}）")

    def section(name: str) -> Dict[str, str]:
        return dict(parser.items(name)) if parser.has_section(name) else {}

    pipeline = section("pipeline")
    _reject_unknown("pipeline", pipeline, PIPELINE_KEYS)
    stages, requested = resolve_stages(pipeline.get("stages", ""))

    potential = build_potential(section("potential"))
    initial = _initial_data(section("initial_data"))
    numeric = _numeric(section("numeric"))
    check_required(stages, numeric)

    output = section("output")
    _reject_unknown("output", output, OUTPUT_KEYS)
    output_dir = Path(output.get("dir", "").strip() or "runs/latest")
    _check_writable(output_dir)

    return ExperimentConfig(
        potential=potential,
        initial_data=initial,
        stages=stages,
        numeric=numeric,
        output_dir=output_dir,
        source=source,
        requested=requested,
    )


def load_config(path: os.PathLike | str) -> ExperimentConfig:
    target = Path(path)
    try:
        text = target.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"无法读取配置文件 {target}：{exc.strerror or exc}") from exc
    return parse_config(text, source=str(target))
