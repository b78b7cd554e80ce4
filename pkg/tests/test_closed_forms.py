from __future__ import annotations

from fractions import Fraction

import pytest

from mbl import structure as st
from mbl.closed_forms import ClassicalExample, SemiclassicalExample, TriangularExample
from mbl.mops import solve_mops
from mbl.suites import _example
from mbl.weights import matrix_moment_table, pearson_polynomial_residual

from conftest import context

EXAMPLES = ["classical_a3_b1_c1", "classical_a5h_b2_c1t", "semiclassical_a3_b1_c1"]


@pytest.mark.parametrize("name", EXAMPLES)
def test_shipped_spec_is_recognized(name):
    assert _example(context(name)) is not None


@pytest.mark.parametrize("name", EXAMPLES)
def test_mops_and_coefficients(name):
    ctx = context(name)
    ex, data = _example(ctx), ctx.data
    for n in range(ctx.n_max + 1):
        assert data.P_L[n] == ex.P(n)
        assert data.xiL[n] == ex.xi(n)
        assert data.etaL[n] == ex.eta(n)


@pytest.mark.parametrize("name", EXAMPLES)
def test_norms_from_degree_two(name):
    ctx = context(name)
    ex = _example(ctx)
    for n in range(2, ctx.n_max + 1):
        assert ctx.data.Cinv[n] == ex.Cinv_closed(n)


@pytest.mark.parametrize("name", EXAMPLES)
def test_expansion_and_assembly(name):
    ctx = context(name)
    ex = _example(ctx)
    first = 2 if isinstance(ex, ClassicalExample) else 3
    for n in range(ctx.n_max + 1):
        assert ex.structure_expansion_residual(n).is_zero()
    for n in range(first, ctx.n_max + 1):
        M = ex.Mtilde(n, ctx.data.C[n - 1], ctx.data.Cinv[n - 1])
        assert (M.map(st._poly) - ctx.structure(n).ML.map(st._poly)).assemble().is_zero()


def test_raw_weight_breaks_closed_forms():
    ex = ClassicalExample(3, 1, 1, n_max=4)
    data = solve_mops(matrix_moment_table(ex.weight("raw"), 10), 4)
    assert any(data.P_L[n] != ex.P(n) for n in range(5))


def test_example_weights_satisfy_pearson():
    for w in (ClassicalExample(3, 1, 1).weight(), ClassicalExample(Fraction(5, 2), 2, Fraction(1, 3)).weight(),
              SemiclassicalExample(3, 1, 1).weight(), TriangularExample(3, 1, 1).weight()):
        assert pearson_polynomial_residual(w).is_zero()


def test_semiclassical_bad_right_data():
    w = SemiclassicalExample(3, 1, 1).weight(right_transposed=False)
    assert not pearson_polynomial_residual(w).is_zero()
