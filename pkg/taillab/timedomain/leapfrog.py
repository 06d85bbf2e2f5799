"""Centered second-order scheme for psi_tt - psi_xx + V psi = 0 on [-L, L].

No absorbing layer: the domain is chosen wide enough that nothing reaches the
ends before the final time, and psi = 0 is imposed there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import CubicSpline

from taillab.core.errors import ConfigError
from taillab.core.grids import GridFunction, nearest_index, uniform_grid
from taillab.core.logs import get_logger
from taillab.potentials import PotentialSpec, sample

logger = get_logger(__name__)

InitialData = Union[GridFunction, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class SimulationConfig:
    half_width: float
    h: float
    k: float
    final_time: float
    recorders: Tuple[float, ...] = (0.0,)
    record_every: int = 1
    energy_every: int = 50

    def __post_init__(self) -> None:
        object.__setattr__(self, "recorders", tuple(float(x) for x in self.recorders))
        if self.h <= 0 or self.k <= 0 or self.final_time <= 0:
            raise ConfigError(f"h、k、T 必须为正（h={self.h}, k={self.k}, T={self.final_time}）")
        if self.k / self.h >= 1.0:
            raise ConfigError(f"违反 Courant 条件：k/h={self.k / self.h:.3f} 必须 < 1")
        if any(abs(x) >= self.half_width for x in self.recorders):
            raise ConfigError(f"记录点必须位于 (−L, L) 内，L={self.half_width}")
        if self.record_every < 1 or self.energy_every < 1:
            raise ConfigError("record_every、energy_every 必须 >= 1")

    @property
    def courant(self) -> float:
        return self.k / self.h

    @property
    def steps(self) -> int:
        return int(round(self.final_time / self.k))

    def grid(self) -> np.ndarray:
        return uniform_grid(-self.half_width, self.half_width, self.h)

    def check_light_cone(self, support: float) -> None:
        if self.half_width <= support + self.final_time:
            raise ConfigError(
                f"区域过小：需要 L > 支撑半径 + T = {support + self.final_time:g}，当前 L={self.half_width:g}",
                hint="增大 half_width 或减小 final_time",
            )


@dataclass(frozen=True)
class SimulationResult:
    times: np.ndarray
    recorders: Tuple[float, ...]
    traces: np.ndarray
    energy_times: np.ndarray
    energy: np.ndarray
    grid: np.ndarray
    final: Tuple[np.ndarray, np.ndarray]

    def trace(self, x0: float) -> np.ndarray:
        for i, x in enumerate(self.recorders):
            if abs(x - x0) <= 1e-12 * max(1.0, abs(x0)):
                return self.traces[i]
        raise KeyError(f"没有位于 x={x0} 的记录点")

    def value_at(self, x0: float, t: float) -> float:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"t={t} 不是记录时刻")
        return float(self.trace(x0)[idx])

    def energy_drift(self) -> float:
        if self.energy.size == 0:
            return 0.0
        scale = max(abs(float(self.energy[0])), 1e-300)
        return float(np.max(np.abs(self.energy - self.energy[0])) / scale)


def _laplacian(u: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(u)
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    return out


def _on_grid(data: InitialData, grid: np.ndarray) -> np.ndarray:
    if isinstance(data, GridFunction):
        if data.grid.shape == grid.shape and np.allclose(data.grid, grid, rtol=0, atol=1e-12):
            return np.asarray(data.values.real, dtype=float)
        spline = CubicSpline(data.grid, data.values.real)
        inside = (grid >= data.grid[0]) & (grid <= data.grid[-1])
        out = np.zeros(grid.shape)
        out[inside] = spline(grid[inside])
        return out
    return np.asarray(data(grid), dtype=float)


def _support_radius(values: np.ndarray, grid: np.ndarray) -> float:
    nz = np.nonzero(values)[0]
    if nz.size == 0:
        return 0.0
    return float(max(abs(grid[nz[0]]), abs(grid[nz[-1]])))


def discrete_energy(prev: np.ndarray, now: np.ndarray, potential: np.ndarray, h: float, k: float) -> float:
    """Conserved leapfrog energy at the half step between prev and now."""
    velocity = (now - prev) / k
    gradient = (np.diff(now) * np.diff(prev)) / (h * h)
    return 0.5 * h * float(np.sum(velocity**2) + np.sum(gradient) + np.sum(potential * now * prev))


def first_level(psi0: np.ndarray, psi1: np.ndarray, potential: np.ndarray, h: float, k: float) -> np.ndarray:
    """Taylor start psi(k) = psi0 + k psi1 + k^2/2 L psi0 + k^3/6 L psi1, L = d_xx - V."""
    l0 = _laplacian(psi0, h) - potential * psi0
    l1 = _laplacian(psi1, h) - potential * psi1
    out = psi0 + k * psi1 + 0.5 * k * k * l0 + k**3 / 6.0 * l1
    out[0] = out[-1] = 0.0
    return out


def _step(prev: np.ndarray, now: np.ndarray, lam2: float, k2v: np.ndarray) -> np.ndarray:
    nxt = np.empty_like(now)
    nxt[1:-1] = 2.0 * now[1:-1] - prev[1:-1] + lam2 * (now[2:] - 2.0 * now[1:-1] + now[:-2]) - k2v[1:-1] * now[1:-1]
    nxt[0] = nxt[-1] = 0.0
    return nxt


def evolve_levels(
    prev: np.ndarray, now: np.ndarray, potential: np.ndarray, h: float, k: float, steps: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Advance the pair (psi^{n-1}, psi^n) by `steps` steps; swapping the pair runs time backwards."""
    lam2 = (k / h) ** 2
    k2v = k * k * potential
    prev = np.array(prev, dtype=float)
    now = np.array(now, dtype=float)
    for _ in range(steps):
        prev, now = now, _step(prev, now, lam2, k2v)
    return prev, now


def leapfrog_solve(
    spec: PotentialSpec,
    psi0: InitialData,
    psi1: InitialData,
    config: SimulationConfig,
    *,
    support: Optional[float] = None,
) -> SimulationResult:
    grid = config.grid()
    h, k = config.h, config.k
    u0 = _on_grid(psi0, grid)
    u1 = _on_grid(psi1, grid)
    if support is None:
        support = max(_support_radius(u0, grid), _support_radius(u1, grid))
    config.check_light_cone(support)
    idx = [nearest_index(grid, x, tol=0.5 * h) for x in config.recorders]
    potential = sample(spec, grid)

    steps = config.steps
    n_rec = steps // config.record_every + 1
    times = np.empty(n_rec)
    traces = np.empty((len(idx), n_rec))
    energy_t = []
    energy = []

    lam2 = config.courant**2
    k2v = k * k * potential
    prev, now = u0, first_level(u0, u1, potential, h, k)
    times[0] = 0.0
    traces[:, 0] = u0[idx]
    slot = 1
    logger.info("leapfrog：%d 个节点，%d 步，k/h=%.3f", grid.size, steps, config.courant)
    for n in range(1, steps + 1):
        if (n - 1) % config.energy_every == 0:
            energy_t.append((n - 0.5) * k)
            energy.append(discrete_energy(prev, now, potential, h, k))
        if n % config.record_every == 0:
            times[slot] = n * k
            traces[:, slot] = now[idx]
            slot += 1
        if n < steps:
            prev, now = now, _step(prev, now, lam2, k2v)
    logger.debug("leapfrog 完成：能量漂移 %.2e", _drift(energy))
    return SimulationResult(
        times[:slot], config.recorders, traces[:, :slot], np.array(energy_t), np.array(energy), grid, (prev, now)
    )


def _drift(energy: Sequence[float]) -> float:
    if not energy:
        return 0.0
    e = np.asarray(energy)
    return float(np.max(np.abs(e - e[0])) / max(abs(e[0]), 1e-300))
