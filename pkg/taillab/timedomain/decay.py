from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from taillab.core.errors import NumericFailure
from taillab.core.logs import get_logger

logger = get_logger(__name__)

NOISE_FLOOR = 1e-14


@dataclass(frozen=True)
class DecayReport:
    x0: float
    exponent: float
    stderr: float
    window: Tuple[float, float]
    amplitude: float
    amplitude_window: Tuple[float, float]
    residual: float
    local_times: np.ndarray
    local_exponent: np.ndarray

    def as_dict(self) -> dict:
        return {
            "x0": self.x0,
            "exponent": self.exponent,
            "stderr": self.stderr,
            "window_lo": self.window[0],
            "window_hi": self.window[1],
            "amplitude": self.amplitude,
            "amplitude_lo": self.amplitude_window[0],
            "amplitude_hi": self.amplitude_window[1],
            "residual": self.residual,
        }


def local_exponent(t: np.ndarray, psi: np.ndarray, *, floor: float = NOISE_FLOOR) -> Tuple[np.ndarray, np.ndarray]:
    """p(t) = -d ln|psi| / d ln t where |psi| stays above the floor."""
    t = np.asarray(t, dtype=float)
    psi = np.asarray(psi, dtype=float)
    keep = (t > 0) & (np.abs(psi) > floor)
    if np.count_nonzero(keep) < 3:
        return t[keep], np.full(np.count_nonzero(keep), np.nan)
    return t[keep], -np.gradient(np.log(np.abs(psi[keep])), np.log(t[keep]))


def _window(t: np.ndarray, lo: float, hi: float) -> np.ndarray:
    if not (0 < lo < hi):
        raise ValueError(f"窗口无效：({lo}, {hi})")
    if lo < t[0] or hi > t[-1] * (1 + 1e-12):
        raise ValueError(f"窗口 ({lo:g}, {hi:g}) 超出采样范围 [{t[0]:g}, {t[-1]:g}]")
    mask = (t >= lo) & (t <= hi)
    if np.count_nonzero(mask) < 3:
        raise ValueError(f"窗口 ({lo:g}, {hi:g}) 内少于 3 个样本")
    return mask


def decay_fit(
    t: np.ndarray,
    psi: np.ndarray,
    window: Optional[Tuple[float, float]] = None,
    *,
    amplitude_window: Optional[Tuple[float, float]] = None,
    x0: float = 0.0,
    floor: float = NOISE_FLOOR,
) -> DecayReport:
    """Slope of ln|psi| against ln t; defaults are [T/8, T/2] for the exponent and [T/4, T/2] for the amplitude."""
    t = np.asarray(t, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if t.shape != psi.shape or t.ndim != 1:
        raise ValueError("t 与 psi 必须为等长一维数组")
    end = float(t[-1])
    window = window or (end / 8.0, end / 2.0)
    amplitude_window = amplitude_window or (end / 4.0, end / 2.0)
    mask = _window(t, *window)
    tw, pw = t[mask], psi[mask]
    if np.any(np.abs(pw) <= floor):
        raise ValueError(f"窗口内 |ψ| 低于噪声下限 {floor:g}")
    if np.any(np.sign(pw) != np.sign(pw[0])):
        raise NumericFailure("窗口内 ψ 变号（振荡污染）", hint="将拟合窗口右移或缩小")

    fit = stats.linregress(np.log(tw), np.log(np.abs(pw)))
    exponent = -float(fit.slope)
    predicted = fit.intercept + fit.slope * np.log(tw)
    residual = float(np.sqrt(np.mean((np.log(np.abs(pw)) - predicted) ** 2)))

    amask = _window(t, *amplitude_window)
    power = round(exponent)
    amplitude = float(np.mean(t[amask] ** power * psi[amask]))
    lt, lp = local_exponent(t, psi, floor=floor)
    logger.info(
        "衰减拟合 x0=%g：指数 %.4f ± %.2e（窗口 [%g, %g]），振幅 %.6g", x0, exponent, fit.stderr, window[0], window[1], amplitude
    )
    return DecayReport(
        float(x0),
        exponent,
        float(fit.stderr),
        (float(window[0]), float(window[1])),
        amplitude,
        (float(amplitude_window[0]), float(amplitude_window[1])),
        residual,
        lt,
        lp,
    )


def plateau_variation(t: np.ndarray, psi: np.ndarray, power: float, window: Tuple[float, float]) -> float:
    """(max - min) / |mean| of t^power psi over the window."""
    t = np.asarray(t, dtype=float)
    mask = _window(t, *window)
    scaled = t[mask] ** power * np.asarray(psi, dtype=float)[mask]
    mean = float(np.mean(scaled))
    if mean == 0.0:
        return float("inf")
    return float((np.max(scaled) - np.min(scaled)) / abs(mean))
