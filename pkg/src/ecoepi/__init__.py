"""Numerical engine for the periodic eco-epidemic model with disease in the prey."""

from .aux_orbits import disease_free_orbits, s0, y0
from .endemic import classify_stability, find_endemic_orbit, poincare
from .integrate import integrate, monodromy
from .mawhin import (compute_bounds, degree_determinant, estimate_permanence_floor,
                     solve_algebraic_root)
from .model import Coefficients, field, homotopy_field, jacobian, log_field
from .periodic import Constant, Harmonic, Sampled, inf_ratio, sup_ratio
from .scenario import load_config, parse_config
from .threshold import W, compute_R, lambda_root

__version__ = "0.1.0"

__all__ = [
    "Coefficients", "Constant", "Harmonic", "Sampled", "W", "classify_stability",
    "compute_R", "compute_bounds", "degree_determinant", "disease_free_orbits",
    "estimate_permanence_floor", "field", "find_endemic_orbit", "homotopy_field",
    "inf_ratio", "integrate", "jacobian", "lambda_root", "load_config", "log_field",
    "monodromy", "parse_config", "poincare", "s0", "solve_algebraic_root", "sup_ratio", "y0",
]
