"""Exact toric line bundle cohomology and asymptotic Morse inequality checks."""

from .cohomology import CohomologyProfile, cohomology_dims, euler_char, vanishing_scan
from .divisors import (
    Divisor,
    ToricVariety,
    builtin,
    cartier_data,
    is_ample,
    is_nef,
    polytope_of,
    restrict_to_prime,
)
from .intersection import chi_polynomial, intersection_table, volume_oracle
from .lattice import Box, Fan, HalfSpaceSystem, enumerate_points, is_complete, is_smooth, reduced_cohomology_dims
from .morse import (
    binom_identity_check,
    chi_q,
    fit_leading,
    power_sum,
    verify_intermediate,
    verify_strong,
    verify_subadditivity,
    verify_weak,
)

__version__ = "0.1.0"
