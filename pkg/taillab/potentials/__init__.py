from .base import Family, PotentialSpec, PowerTerm, Side, free_spec
from .evaluate import derivative, envelope_constant, evaluate, expected_exponents, sample, sup_norm
from .registry import build_potential, get_family, list_families
