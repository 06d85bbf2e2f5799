"""Run-time knobs from the environment, optionally seeded from a .env file.

Variables already present in the process environment always win.
"""

import os
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, TypeVar, Union

T = TypeVar("T")

_TRUE = {"1", "true", "yes", "on"}


def _parse_line(line: str) -> Optional[Tuple[str, str]]:
    line = line.strip()
    if line.startswith("export "):
        line = line[len("export ") :].lstrip()
    if not line or line.startswith("#") or "=" not in line:
        return None
    key, value = (part.strip() for part in line.split("=", 1))
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        value = value[1:-1]
    return (key, value) if key else None


def load_env(path: Union[str, Path] = ".env") -> Dict[str, str]:
    """Copy KEY=VALUE lines into os.environ; returns the pairs actually applied."""
    target = Path(path)
    try:
        lines = target.read_text(encoding="utf-8").splitlines()
    except OSError:
        return {}
    applied: Dict[str, str] = {}
    for line in lines:
        pair = _parse_line(line)
        if pair and pair[0] not in os.environ:
            os.environ[pair[0]] = pair[1]
            applied[pair[0]] = pair[1]
    return applied


def _read(key: str, default: T, convert: Callable[[str], T]) -> T:
    raw = os.environ.get(key)
    if raw is None or not raw.strip():
        return default
    try:
        return convert(raw.strip())
    except ValueError:
        return default


def get_env_int(key: str, default: int) -> int:
    return _read(key, default, int)


def get_env_float(key: str, default: float) -> float:
    return _read(key, default, float)


def get_env_flag(key: str, default: bool = False) -> bool:
    return _read(key, default, lambda raw: raw.lower() in _TRUE)


def get_env_str(key: str, default: str = "") -> str:
    return _read(key, default, str)
