"""Zero-energy solutions of f'' = x^(-m) f through modified Bessel functions.

Phi1 -> 1 and Phi2 ~ x as x -> infinity; their Wronskian Phi1 Phi2' - Phi1' Phi2 is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import mpmath
import numpy as np
from scipy.special import gamma, iv, ivp, kv, kvp

ArrayLike = Union[float, np.ndarray]


def _check(m: int, x: np.ndarray) -> None:
    if int(m) != m or m < 3:
        raise ValueError(f"m 必须为不小于 3 的整数，当前 m={m}")
    if np.any(np.asarray(x) <= 0):
        raise ValueError("x 必须为正数")


def _order(m: int) -> float:
    return 1.0 / (m - 2)


def _argument(m: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """z(x) = 2 x^(1 - m/2) / (m - 2) and dz/dx = -x^(-m/2)."""
    z = 2.0 * x ** (1.0 - m / 2.0) / (m - 2)
    return z, -(x ** (-m / 2.0))


def _prefactors(m: int) -> Tuple[float, float]:
    nu = _order(m)
    a1 = (m - 2) ** nu * gamma(nu + 1.0)
    # the extra 2 makes Phi2 ~ x rather than x / 2
    a2 = 2.0 * (m - 2) ** (-nu) / gamma(nu)
    return a1, a2


def _out(x: ArrayLike, values: np.ndarray) -> ArrayLike:
    return float(values) if np.ndim(x) == 0 else values


def phi1(m: int, x: ArrayLike) -> ArrayLike:
    xs = np.asarray(x, dtype=float)
    _check(m, xs)
    nu = _order(m)
    z, _ = _argument(m, xs)
    a1, _ = _prefactors(m)
    return _out(x, a1 * np.sqrt(xs) * iv(nu, z))


def phi1_prime(m: int, x: ArrayLike) -> ArrayLike:
    xs = np.asarray(x, dtype=float)
    _check(m, xs)
    nu = _order(m)
    z, dz = _argument(m, xs)
    a1, _ = _prefactors(m)
    root = np.sqrt(xs)
    return _out(x, a1 * (iv(nu, z) / (2.0 * root) + root * ivp(nu, z) * dz))


def phi2(m: int, x: ArrayLike) -> ArrayLike:
    xs = np.asarray(x, dtype=float)
    _check(m, xs)
    nu = _order(m)
    z, _ = _argument(m, xs)
    _, a2 = _prefactors(m)
    return _out(x, a2 * np.sqrt(xs) * kv(nu, z))


def phi2_prime(m: int, x: ArrayLike) -> ArrayLike:
    xs = np.asarray(x, dtype=float)
    _check(m, xs)
    nu = _order(m)
    z, dz = _argument(m, xs)
    _, a2 = _prefactors(m)
    root = np.sqrt(xs)
    return _out(x, a2 * (kv(nu, z) / (2.0 * root) + root * kvp(nu, z) * dz))


@dataclass(frozen=True)
class ZeroEnergyPair:
    m: int

    @property
    def order(self) -> float:
        return _order(self.m)

    def sample(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(Phi1, Phi1', Phi2, Phi2') on the given points."""
        x = np.asarray(x, dtype=float)
        return phi1(self.m, x), phi1_prime(self.m, x), phi2(self.m, x), phi2_prime(self.m, x)

    def wronskian(self, x: np.ndarray) -> np.ndarray:
        f1, d1, f2, d2 = self.sample(x)
        return f1 * d2 - d1 * f2


def pair_wronskian(m: int, x: ArrayLike) -> ArrayLike:
    xs = np.asarray(x, dtype=float)
    return _out(x, ZeroEnergyPair(m).wronskian(xs))


def zero_energy_anchor(m: int, v: float, x: ArrayLike) -> ArrayLike:
    """Decaying-normalised zero-energy solution of f'' = v x^(-m) f, v > 0, via x -> x / v^(1/(m-2))."""
    if v <= 0:
        raise ValueError(f"零能锚点只对 v > 0 定义，当前 v={v}")
    scale = v ** (1.0 / (m - 2))
    return phi1(m, np.asarray(x, dtype=float) / scale) if np.ndim(x) else phi1(m, float(x) / scale)


def phi1_m4(x: ArrayLike) -> ArrayLike:
    """m = 4 closed form: I_{1/2} is elementary and Phi1 = x sinh(1/x)."""
    xs = np.asarray(x, dtype=float)
    return _out(x, xs * np.sinh(1.0 / xs))


def phi2_m4(x: ArrayLike) -> ArrayLike:
    xs = np.asarray(x, dtype=float)
    return _out(x, xs * np.exp(-1.0 / xs))


def phi1_mp(m: int, x: float, dps: int = 30) -> float:
    """High-precision reference value of Phi1."""
    with mpmath.workdps(dps):
        nu = mpmath.mpf(1) / (m - 2)
        xm = mpmath.mpf(x)
        z = 2 * xm ** (1 - mpmath.mpf(m) / 2) / (m - 2)
        value = (m - 2) ** nu * mpmath.gamma(nu + 1) * mpmath.sqrt(xm) * mpmath.besseli(nu, z)
        return float(value)


def phi2_mp(m: int, x: float, dps: int = 30) -> float:
    with mpmath.workdps(dps):
        nu = mpmath.mpf(1) / (m - 2)
        xm = mpmath.mpf(x)
        z = 2 * xm ** (1 - mpmath.mpf(m) / 2) / (m - 2)
        value = 2 * (m - 2) ** (-nu) / mpmath.gamma(nu) * mpmath.sqrt(xm) * mpmath.besselk(nu, z)
        return float(value)
