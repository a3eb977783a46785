"""Exact Haar moments of matrix entries over U(d), O(d) and Sp(2d)."""
from .integrator import MomentSpec, Trace, integrate_monomial, integrate_polynomial
from .optimizer import coset_class_sizes, list_class_counts, pair_class_counts
from .ratfunc import RationalFunction
from .weingarten import (
    build_table,
    weingarten_orthogonal,
    weingarten_symplectic,
    weingarten_unitary,
)

__all__ = [
    "MomentSpec",
    "RationalFunction",
    "Trace",
    "build_table",
    "coset_class_sizes",
    "integrate_monomial",
    "integrate_polynomial",
    "list_class_counts",
    "pair_class_counts",
    "weingarten_orthogonal",
    "weingarten_symplectic",
    "weingarten_unitary",
]
