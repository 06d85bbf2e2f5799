from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

SCHEMA_LINE = "# schema=1"

PathLike = Union[str, Path]


def write_csv(path: PathLike, header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    """Write equal-length numeric columns with the versioned schema line first.

    Values are printed with %.17g so identical runs give identical bytes.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    if len(header) != len(columns):
        raise ValueError(f"列名数量 {len(header)} 与数据列数量 {len(columns)} 不一致")
    arrays = [np.asarray(col, dtype=float).ravel() for col in columns]
    lengths = {arr.size for arr in arrays}
    if len(lengths) > 1:
        raise ValueError(f"CSV 各列长度不一致：{sorted(lengths)}")
    table = np.column_stack(arrays) if arrays else np.empty((0, 0))
    with target.open("w", encoding="utf-8", newline="\n") as f:
        f.write(SCHEMA_LINE + "\n")
        f.write(",".join(header) + "\n")
        if table.size:
            np.savetxt(f, table, fmt="%.17g", delimiter=",")
    return target


def read_csv(path: PathLike) -> tuple[list[str], np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != SCHEMA_LINE:
        raise ValueError(f"{path} 缺少 schema 行")
    header = lines[1].split(",")
    if len(lines) <= 2:
        return header, np.empty((0, len(header)))
    data = np.loadtxt(lines[2:], delimiter=",", ndmin=2)
    return header, data


def format_key_values(values: Mapping[str, object]) -> str:
    rows = []
    for key, value in values.items():
        if isinstance(value, float):
            rows.append(f"{key}={value:.17g}")
        else:
            rows.append(f"{key}={value}")
    return "\n".join(rows) + "\n"


def write_key_values(path: PathLike, values: Mapping[str, object]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(format_key_values(values), encoding="utf-8")
    return target
