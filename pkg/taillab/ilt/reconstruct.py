from __future__ import annotations

from typing import Iterable, List, Optional, Sequence

import numpy as np

from taillab.core.errors import SpectralAssumptionError
from taillab.core.grids import GridFunction, bracket
from taillab.core.logs import get_logger
from taillab.frequency.resolvent import FitKind, SingularFit, fit_singular_coefficient, green_apply_at
from taillab.frequency.wronskian import SpectralVerdict
from taillab.ilt.bromwich import bromwich_many
from taillab.ilt.contours import DeformedHairpin, VerticalLine
from taillab.ilt.hairpin import CutModel, deformed_cut_integral
from taillab.potentials import PotentialSpec

logger = get_logger(__name__)


def tail_models(spec: PotentialSpec, fits: Sequence[SingularFit], *, exponent: Optional[int] = None) -> List[CutModel]:
    """Branch-cut model terms for the fitted coefficients.

    sine: eps^{m-1} ln eps / (1 + eps <x0>)^{m+2}; cosine: eps^m ln eps / (1 + eps <x0>)^{m+3}.
    exponent overrides the sine M; the cosine term then uses exponent + 1.
    """
    m = spec.m
    models = []
    for fit in fits:
        sine = fit.kind is FitKind.SINE
        p = m - 1 if sine else m
        big_m = m + 2 if sine else m + 3
        if exponent is not None:
            big_m = exponent if sine else exponent + 1
        models.append(CutModel(fit.coefficient, p, True, float(bracket(fit.x0)), big_m))
    return models


def tail_prediction(
    spec: PotentialSpec,
    fits: Sequence[SingularFit],
    ts: Iterable[float],
    *,
    exponent: Optional[int] = None,
    contour: Optional[DeformedHairpin] = None,
) -> np.ndarray:
    models = tail_models(spec, fits, exponent=exponent)
    return np.array([sum(deformed_cut_integral(model, float(t), contour) for model in models) for t in ts])


def default_fits(spec: PotentialSpec, psi0: GridFunction, psi1: GridFunction, x0: float) -> List[SingularFit]:
    fits = []
    if not psi1.is_zero():
        fits.append(fit_singular_coefficient(spec, psi0, psi1, x0, kind=FitKind.SINE))
    if not psi0.is_zero():
        fits.append(fit_singular_coefficient(spec, psi0, psi1, x0, kind=FitKind.COSINE))
    return fits


def reconstruct_time_solution(
    spec: PotentialSpec,
    psi0: GridFunction,
    psi1: GridFunction,
    x0: float,
    t_grid: Iterable[float],
    *,
    contour: Optional[VerticalLine] = None,
    t_switch: Optional[float] = None,
    fits: Optional[Sequence[SingularFit]] = None,
    exponent: Optional[int] = None,
    verdict: Optional[SpectralVerdict] = None,
) -> np.ndarray:
    """psi(x0, t) = L^{-1} psi_hat(x0, .) on the Bromwich line.

    Times beyond t_switch use the hairpin integral of the fitted singular terms instead.
    """
    if verdict is not None and not verdict.ok:
        raise SpectralAssumptionError(verdict.describe(), verdict=verdict)
    ts = np.asarray(list(t_grid), dtype=float)
    if ts.size and np.any(ts <= 0):
        raise ValueError("t_grid 必须全部 > 0")
    out = np.zeros(ts.shape, dtype=float)
    if psi0.is_zero() and psi1.is_zero():
        return out

    late = np.zeros(ts.shape, dtype=bool) if t_switch is None else ts > t_switch
    early = ~late
    if np.any(early):
        sampler = green_apply_at(spec, psi0, psi1, x0)
        values = bromwich_many(sampler, ts[early], contour)
        out[early] = np.real(values)
    if np.any(late):
        if fits is None:
            fits = default_fits(spec, psi0, psi1, x0)
        logger.info("t > %g 使用 hairpin 尾部模型（%d 项）", t_switch, len(fits))
        out[late] = tail_prediction(spec, fits, ts[late], exponent=exponent)
    return out
