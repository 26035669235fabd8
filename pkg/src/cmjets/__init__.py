"""Boundary jets of holomorphic maps between strongly pseudoconvex hypersurface germs."""
from .jets import (ContactReport, DifferentialData, Flat2Report, JetMap, check_first_order,
                   check_flat2_conditions, check_lemma_2flat, check_second_order, classify_contact,
                   construct_2flat_germ, construct_first_order_germ, expand_basic, parabolic_automorphism,
                   siegel_automorphism)
from .normalform import (CoordChange, HypersurfaceModel, cm_normalize, levi_normalize, transform_graph,
                         weighted_equivalence)
from .scalars import GaussQ
from .trace import BihomForm, normal_space_check, trace, trace_decompose
from .verdict import InternalError, PreconditionError, Status, Verdict
from .wpoly import HoloPoly, Monomial, WPoly

__version__ = "0.1.0"

__all__ = [
    "BihomForm",
    "ContactReport",
    "CoordChange",
    "DifferentialData",
    "Flat2Report",
    "GaussQ",
    "HoloPoly",
    "HypersurfaceModel",
    "InternalError",
    "JetMap",
    "Monomial",
    "PreconditionError",
    "Status",
    "Verdict",
    "WPoly",
    "check_first_order",
    "check_flat2_conditions",
    "check_lemma_2flat",
    "check_second_order",
    "classify_contact",
    "cm_normalize",
    "construct_2flat_germ",
    "construct_first_order_germ",
    "expand_basic",
    "levi_normalize",
    "normal_space_check",
    "parabolic_automorphism",
    "siegel_automorphism",
    "trace",
    "trace_decompose",
    "transform_graph",
    "weighted_equivalence",
]
