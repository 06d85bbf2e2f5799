from __future__ import annotations

from typing import Tuple, Union

import numpy as np

from taillab.core.grids import bracket
from taillab.potentials.base import Family, PotentialSpec, Side
from taillab.potentials.bridge import bridged_tail, well

ArrayLike = Union[float, np.ndarray]


def _as_output(x: ArrayLike, values: np.ndarray) -> ArrayLike:
    return float(values) if np.ndim(x) == 0 else values


def derivative(spec: PotentialSpec, x: ArrayLike, k: int = 0) -> ArrayLike:
    """k-th derivative of V, 0 <= k <= m + 2, vectorised over x."""
    if not (0 <= int(k) <= spec.smoothness) or int(k) != k:
        raise ValueError(f"导数阶数 k 必须位于 0..{spec.smoothness}，当前 k={k}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    values = bridged_tail(spec, xs, Side.PLUS, k) + bridged_tail(spec, xs, Side.MINUS, k) + well(spec, xs, k)
    return _as_output(x, values.reshape(np.shape(x)))


def evaluate(spec: PotentialSpec, x: ArrayLike) -> ArrayLike:
    return derivative(spec, x, 0)


def sample(spec: PotentialSpec, grid: np.ndarray) -> np.ndarray:
    return np.asarray(derivative(spec, np.asarray(grid, dtype=float), 0), dtype=float)


def envelope_constant(spec: PotentialSpec, k: int, grid: np.ndarray) -> float:
    """max |V^(k)(x)| <x>^(alpha + k) over the grid, alpha the leading tail exponent."""
    grid = np.asarray(grid, dtype=float)
    alpha = spec.leading_exponent()
    values = np.abs(derivative(spec, grid, k)) * bracket(grid) ** (alpha + k)
    return float(np.max(values))


def sup_norm(spec: PotentialSpec, *, points: int = 8001) -> float:
    """||V||_inf; beyond the cutoffs |V| only decreases so a middle grid suffices."""
    grid = np.linspace(spec.x_minus, spec.x_plus, points)
    return float(np.max(np.abs(sample(spec, grid))))


def expected_exponents(spec: PotentialSpec) -> Tuple[float, float]:
    """(sine, cosine) pointwise decay exponents."""
    if spec.family is Family.SUM:
        alpha = spec.leading_exponent()
        return alpha, alpha + 1.0
    return float(spec.m), float(spec.m + 1)
