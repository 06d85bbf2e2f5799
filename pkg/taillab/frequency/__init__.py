from .jost import (
    Frequency,
    JostDiagnostics,
    JostSettings,
    JostSolution,
    epsilon_derivative_bound,
    extend_to_line,
    first_picard_term,
    jost_pair,
    residual,
    solve_s,
)
from .resolvent import (
    FitKind,
    GreenOperator,
    ResolventResult,
    SingularFit,
    fit_singular_coefficient,
    free_g0,
    free_g0_time,
    free_g1,
    green_apply,
    green_apply_at,
    psi_hat,
    resolvent_residual,
)
from .wronskian import (
    SpectralStatus,
    SpectralVerdict,
    check_spectral_assumptions,
    q3_profile,
    wronskian,
    wronskian_profile,
    wronskian_value,
)
