"""Exact verifier for invariants of the secant variety of a rational normal curve."""

from .chow import ChowRing, NamedDivisors, anticanonical_volume, degree, higher_secant_invariants
from .kstab import equivariant_alpha, zhuang_check
from .ledger import lct_from_ledger, replay, secant_resolution_ledger
from .scalar import RatFunc, coerce_d, format_scalar

__version__ = "0.1.0"

__all__ = [
    "ChowRing",
    "NamedDivisors",
    "RatFunc",
    "anticanonical_volume",
    "coerce_d",
    "degree",
    "equivariant_alpha",
    "format_scalar",
    "higher_secant_invariants",
    "lct_from_ledger",
    "replay",
    "secant_resolution_ledger",
    "zhuang_check",
]
