"""Exact verification of Nijenhuis operators with a unity and of F-manifolds.

All computations are over the rationals, on sparse polynomials or on
total-degree-truncated power series; identities are checked symbolically and
reported with their exact residuals.
"""

from .fman import (
    FManifoldModel,
    FrameDegenerateError,
    Multiplication,
    check_fmanifold_axioms,
    check_frame_relations,
    check_pde_thm6,
    check_thm6_equivalence,
    frame_fields,
    multiplication_on_frame,
    operator_from_mult,
    structure_constants_3d,
)
from .forms import Form, FormSpec, build
from .parser import ModelError, ParseError, load_model, parse_expression
from .ring import MultiPoly, NotDivisibleError, TruncSeries, series_exp, variables
from .tensor import OperatorField, VectorField, char_coefficients, nijenhuis_torsion
from .verify import Report, check_2d_criterion, check_nijenhuis, check_unity

__version__ = "0.1.0"

__all__ = [
    "FManifoldModel",
    "Form",
    "FormSpec",
    "FrameDegenerateError",
    "ModelError",
    "MultiPoly",
    "Multiplication",
    "NotDivisibleError",
    "OperatorField",
    "ParseError",
    "Report",
    "TruncSeries",
    "VectorField",
    "build",
    "char_coefficients",
    "check_2d_criterion",
    "check_fmanifold_axioms",
    "check_frame_relations",
    "check_nijenhuis",
    "check_pde_thm6",
    "check_thm6_equivalence",
    "check_unity",
    "frame_fields",
    "load_model",
    "multiplication_on_frame",
    "nijenhuis_torsion",
    "operator_from_mult",
    "parse_expression",
    "series_exp",
    "structure_constants_3d",
    "variables",
]
