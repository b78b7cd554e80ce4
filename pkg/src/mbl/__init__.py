"""Exact-arithmetic engine for matrix biorthogonal polynomials of Bessel-type weights."""

from __future__ import annotations

from .exactnum import GaussianRational, format_scalar, parse_scalar
from .mops import MopsData, second_kind_series, solve_mops
from .polymat import MatPoly, MatrixGR
from .report import ResidualReport
from .weights import PearsonData, WeightSpec, load_weight_spec, matrix_moment_table, parse_weight_spec

__all__ = [
    "GaussianRational",
    "MatrixGR",
    "MatPoly",
    "PearsonData",
    "WeightSpec",
    "MopsData",
    "ResidualReport",
    "format_scalar",
    "parse_scalar",
    "parse_weight_spec",
    "load_weight_spec",
    "matrix_moment_table",
    "solve_mops",
    "second_kind_series",
]
