from .dual import DualSample, SeriesReport, dual_samples, reconstruct_s, reconstruct_s_report
from .logpoly import LogPolySeries, closed_form_next, large_tau_series, small_tau_series, taylor_coefficients
from .nm0 import estimate_leading_coefficient, nm0_coefficients, nm0_expansion, nm0_integral
from .recurrence import (
    STANDARD_RAYS,
    RayFunction,
    bound_holds,
    build_f_table,
    check_ray,
    factorial_bound,
    first_term,
    j_index,
    ray_grid,
    recurrence_residual,
    recurrence_step,
    sector_constant,
)
from .small_eps import HFit, SampleSource, extract_h_coefficients, h_limits
