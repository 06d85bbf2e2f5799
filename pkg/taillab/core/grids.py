from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from taillab.core import quadrature

MOMENT_ORDER = 8
EDGE = 3

# sixth-order central first derivative
_D1_COEFFS = np.array([-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60])


def bracket(x: np.ndarray | float) -> np.ndarray:
    """Japanese bracket (1 + x^2)^(1/2)."""
    return np.sqrt(1.0 + np.square(np.asarray(x, dtype=float)))


def uniform_grid(lo: float, hi: float, h: float) -> np.ndarray:
    if not (hi > lo) or h <= 0:
        raise ValueError(f"网格区间无效：lo={lo}, hi={hi}, h={h}")
    n = int(round((hi - lo) / h))
    if n < 1:
        raise ValueError(f"网格步长 h={h} 大于区间长度")
    return lo + h * np.arange(n + 1, dtype=float)


def grid_step(grid: np.ndarray, *, rtol: float = 1e-6) -> float:
    """Spacing of a uniform grid; raises if the grid is not uniform."""
    diffs = np.diff(np.asarray(grid, dtype=float))
    if diffs.size == 0 or np.any(diffs <= 0):
        raise ValueError("网格必须严格递增且至少包含两个点")
    h = float(diffs.mean())
    if np.max(np.abs(diffs - h)) > rtol * h:
        raise ValueError("网格需为等距网格")
    return h


def extend_uniform(grid: np.ndarray, lo: float, hi: float) -> Tuple[np.ndarray, int]:
    """Extend a uniform grid by whole steps so it covers [lo, hi].

    Returns the new grid and the offset of the original nodes, which are kept
    bit-for-bit.
    """
    grid = np.asarray(grid, dtype=float)
    h = grid_step(grid)
    n_left = max(0, int(np.ceil((grid[0] - lo) / h - 1e-9)))
    n_right = max(0, int(np.ceil((hi - grid[-1]) / h - 1e-9)))
    left = grid[0] - h * np.arange(n_left, 0, -1, dtype=float)
    right = grid[-1] + h * np.arange(1, n_right + 1, dtype=float)
    return np.concatenate([left, grid, right]), n_left


def nearest_index(grid: np.ndarray, x: float, *, tol: Optional[float] = None) -> int:
    idx = int(np.argmin(np.abs(grid - x)))
    if tol is not None and abs(grid[idx] - x) > tol:
        raise ValueError(f"点 x={x} 不在网格上（最近节点 {grid[idx]}）")
    return idx


def stencil_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """First derivative on a uniform grid, sixth order in the interior.

    The EDGE points at each end fall back to np.gradient and should be excluded
    from residual checks.
    """
    values = np.asarray(values)
    out = np.gradient(values, h, edge_order=2)
    n = values.size
    if n <= 2 * EDGE:
        return out
    acc = np.zeros(n - 2 * EDGE, dtype=np.result_type(values, float))
    for k, c in enumerate(_D1_COEFFS):
        if c != 0.0:
            acc = acc + c * values[k : n - 2 * EDGE + k]
    out = out.astype(acc.dtype, copy=True)
    out[EDGE : n - EDGE] = acc / h
    return out


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on an increasing grid plus weighted L1 moments."""

    grid: np.ndarray
    values: np.ndarray
    derivative: Optional[np.ndarray] = None
    moments: Tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values)
        if grid.ndim != 1 or values.shape != grid.shape:
            raise ValueError(f"grid 与 values 形状不一致：{grid.shape} vs {values.shape}")
        if grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("GridFunction 的网格必须严格递增")
        if not np.all(np.isfinite(values)):
            raise ValueError("GridFunction 含有非有限值")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.derivative is not None:
            deriv = np.asarray(self.derivative)
            if deriv.shape != grid.shape:
                raise ValueError("derivative 与网格形状不一致")
            object.__setattr__(self, "derivative", deriv)
        if not self.moments:
            weights = bracket(grid)
            magnitude = np.abs(values)
            moments = tuple(
                float(quadrature.cubic_integral(magnitude * weights**k, grid).real) for k in range(MOMENT_ORDER + 1)
            )
            object.__setattr__(self, "moments", moments)

    @property
    def step(self) -> float:
        return grid_step(self.grid)

    @property
    def support(self) -> Tuple[float, float]:
        nz = np.nonzero(np.abs(self.values) > 0)[0]
        if nz.size == 0:
            return (float(self.grid[0]), float(self.grid[0]))
        return (float(self.grid[nz[0]]), float(self.grid[nz[-1]]))

    def is_zero(self) -> bool:
        return not np.any(np.abs(self.values) > 0)

    def moment(self, k: int) -> float:
        """||<x>^k f||_1 computed at construction."""
        if k < 0 or k >= len(self.moments):
            raise ValueError(f"矩阶数 k={k} 超出范围 0..{len(self.moments) - 1}")
        return self.moments[k]

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def derivative_values(self) -> np.ndarray:
        if self.derivative is not None:
            return self.derivative
        return stencil_derivative(self.values, self.step)

    def scaled(self, factor: complex) -> "GridFunction":
        deriv = None if self.derivative is None else factor * self.derivative
        return GridFunction(self.grid, factor * self.values, deriv)

    def plus(self, other: "GridFunction") -> "GridFunction":
        if other.grid.shape != self.grid.shape or not np.array_equal(other.grid, self.grid):
            raise ValueError("两个 GridFunction 的网格不一致")
        deriv = None
        if self.derivative is not None and other.derivative is not None:
            deriv = self.derivative + other.derivative
        return GridFunction(self.grid, self.values + other.values, deriv)

    def padded(self, grid: np.ndarray, offset: int) -> "GridFunction":
        """Zero-extend onto a grid containing this one at the given offset."""
        values = np.zeros(grid.shape, dtype=self.values.dtype)
        values[offset : offset + self.values.size] = self.values
        deriv = None
        if self.derivative is not None:
            deriv = np.zeros(grid.shape, dtype=self.derivative.dtype)
            deriv[offset : offset + self.derivative.size] = self.derivative
        return GridFunction(grid, values, deriv)

    def value_at(self, x: float) -> complex:
        idx = nearest_index(self.grid, x, tol=1e-9 * max(1.0, abs(x)) + 1e-12)
        return complex(self.values[idx])


def zeros_like(f: GridFunction) -> GridFunction:
    return GridFunction(f.grid, np.zeros_like(f.values), np.zeros_like(f.values))
