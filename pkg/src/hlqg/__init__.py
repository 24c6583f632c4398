"""Exact and numerical verification tools for a quantum deformation of SL(2, C)."""

__version__ = "0.1.0"

from .ncalg import NCPoly, TensorPoly, adjoint, is_central, mul, normal_form  # noqa: E402
from .hopf import check_hopf_axioms, delta, epsilon, kappa  # noqa: E402
from .parser import ParseError, parse  # noqa: E402

__all__ = [
    "NCPoly",
    "TensorPoly",
    "ParseError",
    "adjoint",
    "check_hopf_axioms",
    "delta",
    "epsilon",
    "is_central",
    "kappa",
    "mul",
    "normal_form",
    "parse",
]
