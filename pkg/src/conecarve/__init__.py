"""Rational polyhedral approximations of second-order cones.

Schedules of Pythagorean-triple rotation angles give lifted linear systems
with small integer data whose projection lies between the Lorentz cone and a
certified scaled copy of it.
"""

from .errors import (
    CertificationError,
    ConecarveError,
    PrecisionExhausted,
    PreconditionError,
    SizeGuardError,
    WindowInfeasible,
)
from .exactnum import DirectedInterval, PythagoreanTriple, RationalAngle
from .linsys import LinearSystem, Row, Variable
from .sizing import coeff_bound_L3, coeff_bound_LN, delta_epsilon, hat_nu_delta, kappa_delta, nu_delta
from .triplesearch import (
    AngleSchedule,
    build_schedule,
    closedform_schedule,
    improved_schedule,
    optimized_schedule,
    psi,
    reverse_schedule,
)
from .cone3 import build_P, build_P_tilde, canonical_witness, integerize_witness, membership_certificate
from .towern import accuracy_given_C, build_QN, build_QN_closedform, build_RN, disaggregation_layout, tower_layout
from .verify import LPResult, enumerate_lattice, is_member, lattice_equivalence_check, lp_solve

__version__ = "0.1.0"

__all__ = [
    "AngleSchedule",
    "CertificationError",
    "ConecarveError",
    "DirectedInterval",
    "LPResult",
    "LinearSystem",
    "PrecisionExhausted",
    "PreconditionError",
    "PythagoreanTriple",
    "RationalAngle",
    "Row",
    "SizeGuardError",
    "Variable",
    "WindowInfeasible",
    "accuracy_given_C",
    "build_P",
    "build_P_tilde",
    "build_QN",
    "build_QN_closedform",
    "build_RN",
    "build_schedule",
    "canonical_witness",
    "closedform_schedule",
    "coeff_bound_L3",
    "coeff_bound_LN",
    "delta_epsilon",
    "disaggregation_layout",
    "enumerate_lattice",
    "hat_nu_delta",
    "improved_schedule",
    "integerize_witness",
    "is_member",
    "kappa_delta",
    "lattice_equivalence_check",
    "lp_solve",
    "membership_certificate",
    "nu_delta",
    "optimized_schedule",
    "psi",
    "reverse_schedule",
    "tower_layout",
]
