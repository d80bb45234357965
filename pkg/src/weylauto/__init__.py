"""Exact symbolic calculus for polynomial differential operators on R^n.

Modules:

* ``ratpoly``  polynomials over the rationals
* ``weyl``     differential operators: composition, bracket, adjoint, Lie derivative
* ``classical`` symbols on T*R^n, the principal symbol and the Poisson bracket
* ``autos``    automorphism families, parameter recovery, verification
* ``classify`` order-2 extension constraints and their exact solution
* ``cli``      command-line front end
"""

from .autos import (
    AutoSpec,
    NotInFamilyError,
    OneForm,
    PolyDiffeo,
    conjugation_c,
    d1_automorphism,
    d1_recover_parameters,
    d_automorphism,
    d_recover_parameters,
    exp_omega_bar,
    omega_bar,
    pushforward,
    s_automorphism,
    s_recover_parameters,
    u_kappa,
    verify_automorphism,
)
from .classical import PolySymbol, poisson_bracket, principal_symbol, symbol_compat_check
from .classify import TruncatedSpace, build_order2_constraints, gl_invariance_check, solve_admissible
from .expr import parse_expr, parse_value
from .ratpoly import RationalPoly
from .weyl import DiffOp, VectorField, divergence, formal_adjoint, lie_derivative, op_bracket, op_compose

__version__ = "0.1.0"

__all__ = [
    "AutoSpec",
    "DiffOp",
    "NotInFamilyError",
    "OneForm",
    "PolyDiffeo",
    "PolySymbol",
    "RationalPoly",
    "TruncatedSpace",
    "VectorField",
    "build_order2_constraints",
    "conjugation_c",
    "d1_automorphism",
    "d1_recover_parameters",
    "d_automorphism",
    "d_recover_parameters",
    "divergence",
    "exp_omega_bar",
    "formal_adjoint",
    "gl_invariance_check",
    "lie_derivative",
    "omega_bar",
    "op_bracket",
    "op_compose",
    "parse_expr",
    "parse_value",
    "poisson_bracket",
    "principal_symbol",
    "pushforward",
    "s_automorphism",
    "s_recover_parameters",
    "solve_admissible",
    "symbol_compat_check",
    "u_kappa",
    "verify_automorphism",
]
