"""Python bindings for the chatelet core library.

Form systems are passed as dicts (or JSON strings) in the same shape the CLI reads:
{"n": 1, "d": 2, "R": 1, "forms": [[[coeff, [e0, e1]], ...], ...]}.
"""

import json
from fractions import Fraction

from . import _chatelet
from ._chatelet import (
    InconclusiveError,
    ResourceError,
    brsub_order,
    hensel_conic_soluble,
    hilbert,
    hilbert_product,
    is_norm,
    kronecker,
    suite_names,
    verify,
    vp,
    zeta,
)

__all__ = [
    "InconclusiveError",
    "ResourceError",
    "brsub_order",
    "constants_compare",
    "count_N",
    "gamma_T",
    "hensel_conic_soluble",
    "hilbert",
    "hilbert_product",
    "is_norm",
    "kronecker",
    "suite_names",
    "verify",
    "vp",
    "zeta",
]


def _system_text(system):
    return system if isinstance(system, str) else json.dumps(system)


def count_N(system, D, B, threads=0, budget=0):
    return _chatelet.count_N(_system_text(system), D, B, threads, budget)


def gamma_T(system, D, signs, T=4, levels=None, threads=0, budget=0):
    """Truncated local density for one sign vector, as an exact Fraction."""
    out = _chatelet.gamma_T(_system_text(system), D, signs, T, dict(levels or {}), threads, budget)
    num, den = out["gamma_T"]
    return Fraction(num, den)


def constants_compare(system, D, T=4, levels=None, threads=0, budget=0):
    return _chatelet.constants_compare(_system_text(system), D, T, dict(levels or {}), threads, budget)
