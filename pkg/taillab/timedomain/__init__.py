from .decay import DecayReport, decay_fit, local_exponent, plateau_variation
from .duhamel import ContractionReport, DuhamelResult, contraction_report, duhamel_solve, free_evolution
from .initial_data import (
    Bump,
    Gaussian,
    InitialProfile,
    RandomBumps,
    Zero,
    initial_bump,
    initial_gaussian,
    random_bump,
    support_radius,
)
from .leapfrog import SimulationConfig, SimulationResult, discrete_energy, evolve_levels, first_level, leapfrog_solve
