"""Behavioral inequalities over Laurent-polynomial shift operators.

Exact rational arithmetic throughout: polynomial matrices in the shift ``s``
and its inverse, trajectories with explicit extension rules, feasibility
decisions backed by checkable certificates or witnesses, unimodular
reduction, and slack parametrization of solution sets.
"""

from .feasibility import (Certificate, Feasible, Infeasible, Unknown, Verdict, certificate_search,
                          decide, verify_certificate, verify_witness, witness_search)
from .laurent import SIGMA, SIGMA_INV, LaurentPoly, PolyMatrix, adjoint, is_unit
from .model import (BehavioralSystem, ModelDimensionError, ModelSyntaxError, lti_to_behavior,
                    parse_model, serialize_model)
from .parametrize import build_recursive_form, required_footprint, rollout
from .reduction import ReducedForm, det, rank, reduce
from .trajectory import Extension, Trajectory, apply, inner_product, satisfies

__version__ = "0.1.0"

__all__ = [
    "BehavioralSystem", "Certificate", "Extension", "Feasible", "Infeasible", "LaurentPoly",
    "ModelDimensionError", "ModelSyntaxError", "PolyMatrix", "ReducedForm", "SIGMA",
    "SIGMA_INV", "Trajectory", "Unknown", "Verdict", "adjoint", "apply", "build_recursive_form",
    "certificate_search", "decide", "det", "inner_product", "is_unit", "lti_to_behavior",
    "parse_model", "rank", "reduce", "required_footprint", "rollout", "satisfies",
    "serialize_model", "verify_certificate", "verify_witness", "witness_search",
]
