from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from taillab.core.grids import GridFunction

ArrayLike = Union[float, np.ndarray]

GAUSSIAN_CUTOFF = 8.0


def _out(x: ArrayLike, values: np.ndarray) -> ArrayLike:
    return values if np.ndim(x) else float(np.reshape(values, -1)[0])


@dataclass(frozen=True)
class Bump:
    """amplitude * exp(1 - 1/(1 - r^2)), r = (x - center)/radius; smooth, compact."""

    center: float = 0.0
    radius: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError(f"radius 必须 > 0，当前 {self.radius}")

    @property
    def support(self) -> Tuple[float, float]:
        return self.center - self.radius, self.center + self.radius

    def __call__(self, x: ArrayLike) -> ArrayLike:
        r = (np.atleast_1d(np.asarray(x, dtype=float)) - self.center) / self.radius
        inside = np.abs(r) < 1.0
        values = np.zeros(r.shape)
        values[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        return _out(x, values)

    def sample(self, grid: np.ndarray) -> GridFunction:
        return GridFunction(grid, np.asarray(self(np.asarray(grid, dtype=float)), dtype=float))


@dataclass(frozen=True)
class Gaussian:
    """Truncated to zero beyond GAUSSIAN_CUTOFF widths."""

    center: float = 0.0
    width: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError(f"width 必须 > 0，当前 {self.width}")

    @property
    def support(self) -> Tuple[float, float]:
        half = GAUSSIAN_CUTOFF * self.width
        return self.center - half, self.center + half

    def __call__(self, x: ArrayLike) -> ArrayLike:
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        values = np.where(np.abs(u) < GAUSSIAN_CUTOFF, self.amplitude * np.exp(-0.5 * u**2), 0.0)
        return _out(x, values)

    def sample(self, grid: np.ndarray) -> GridFunction:
        return GridFunction(grid, np.asarray(self(np.asarray(grid, dtype=float)), dtype=float))


@dataclass(frozen=True)
class RandomBumps:
    """A few positive bumps with seeded centers, radii and heights inside center +- radius."""

    seed: int
    center: float = 0.0
    radius: float = 2.0
    count: int = 3

    def __post_init__(self) -> None:
        if self.radius <= 0 or self.count < 1:
            raise ValueError("RandomBumps 需要 radius > 0 且 count >= 1")

    @property
    def parts(self) -> Tuple[Bump, ...]:
        rng = np.random.default_rng(self.seed)
        parts = []
        for _ in range(self.count):
            r = rng.uniform(0.25, 0.5) * self.radius
            c = self.center + rng.uniform(-1.0, 1.0) * (self.radius - r)
            parts.append(Bump(c, r, rng.uniform(0.5, 1.5)))
        return tuple(parts)

    @property
    def support(self) -> Tuple[float, float]:
        return self.center - self.radius, self.center + self.radius

    def __call__(self, x: ArrayLike) -> ArrayLike:
        xs = np.asarray(x, dtype=float)
        values = sum((np.asarray(b(xs)) for b in self.parts), np.zeros(xs.shape))
        return _out(x, values)

    def sample(self, grid: np.ndarray) -> GridFunction:
        return GridFunction(grid, np.asarray(self(np.asarray(grid, dtype=float)), dtype=float))


@dataclass(frozen=True)
class Zero:
    @property
    def support(self) -> Tuple[float, float]:
        return 0.0, 0.0

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return _out(x, np.zeros(np.shape(x)))

    def sample(self, grid: np.ndarray) -> GridFunction:
        return GridFunction(grid, np.zeros(np.asarray(grid).shape))


InitialProfile = Union[Bump, Gaussian, RandomBumps, Zero]


def support_radius(profile: InitialProfile) -> float:
    lo, hi = profile.support
    return max(abs(lo), abs(hi))


def initial_bump(grid: np.ndarray, center: float = 0.0, radius: float = 1.0, amplitude: float = 1.0) -> GridFunction:
    return Bump(center, radius, amplitude).sample(grid)


def initial_gaussian(grid: np.ndarray, center: float = 0.0, width: float = 1.0, amplitude: float = 1.0) -> GridFunction:
    return Gaussian(center, width, amplitude).sample(grid)


def random_bump(grid: np.ndarray, seed: int, center: float = 0.0, radius: float = 2.0) -> GridFunction:
    return RandomBumps(seed, center, radius).sample(grid)
