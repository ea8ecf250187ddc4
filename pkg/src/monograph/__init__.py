"""Certified computations with continuous functions whose graphs are
monotone metric spaces: exact piecewise-linear calculus, the recursive and
peak-sum constructions, monotonicity checks, Dini estimates and planar
geometry of graphs."""

from .exact_core import GraphPoint, PLFunction, Rational, jordan_decompose, pl_eval, pl_sup_diff, pl_total_variation

__version__ = "0.1.0"

__all__ = ["GraphPoint", "PLFunction", "Rational", "jordan_decompose", "pl_eval", "pl_sup_diff", "pl_total_variation"]
