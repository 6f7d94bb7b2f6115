"""Polynomial dynamics and additive combinatorics over finite-field towers."""
from .elemset import ElemSet
from .errors import FfdynError, InputError, InvariantViolation, WorkCapExceeded
from .fpoly import Poly
from .gf_tower import FieldCtx, build_field, decode, encode, field_from_spec

__all__ = [
    "ElemSet",
    "FfdynError",
    "FieldCtx",
    "InputError",
    "InvariantViolation",
    "Poly",
    "WorkCapExceeded",
    "build_field",
    "decode",
    "encode",
    "field_from_spec",
]

__version__ = "0.1.0"
