from __future__ import annotations

from fractions import Fraction

import pytest

from mbl import structure as st
from mbl.polymat import MatrixGR

from conftest import context

MATRIX = ["classical_a3_b1_c1", "classical_a5h_b2_c1t", "semiclassical_a3_b1_c1", "triangular_a3_b1_c1",
          "nonabelian_one_sided"]
ALL = MATRIX + ["scalar_a3_b1", "scalar_a5h_b2", "scalar_a3_b1pi"]


def _diff(A, B):
    return (A.map(st._poly) - B.map(st._poly)).assemble()


@pytest.mark.parametrize("name", ALL)
def test_formula_matches_definition(name):
    ctx = context(name)
    for n in range(1, ctx.n_max + 1):
        oracle, bad = st.structure_from_definition(ctx.data, ctx.series, ctx.spec.pearson, n)
        assert bad == []
        assert _diff(ctx.structure(n).ML, oracle.ML).is_zero()
        assert st.degree_of(oracle.ML) <= 2


def test_literal_semiclassical_formula_fails():
    ctx = context("semiclassical_a3_b1_c1")
    lit = st.structure_semiclassical(ctx.data, ctx.spec.pearson, 3, literal=True)
    assert not _diff(lit.ML, ctx.structure(3).ML).is_zero()


@pytest.mark.parametrize("name", ALL)
def test_zero_curvature(name):
    ctx = context(name)
    for n in range(1, ctx.n_max):
        T = st.build_transfer(ctx.data, n)
        Mn, Mn1 = ctx.structure(n), ctx.structure(n + 1)
        assert st.zero_curvature_residual(Mn.ML, Mn1.ML, T.TL).is_zero()
        assert st.zero_curvature_right_residual(Mn.MR, Mn1.MR, T.TR).is_zero()


def test_zero_curvature_detects_perturbation():
    ctx = context("classical_a3_b1_c1")
    data = ctx.data.perturbed(xiL={2: ctx.data.xiL[2] + MatrixGR.scalar(2, Fraction(1, 7))})
    T = st.build_transfer(data, 2)
    assert not st.zero_curvature_residual(ctx.structure(2).ML, ctx.structure(3).ML, T.TL).is_zero()


@pytest.mark.parametrize("name", ALL)
def test_ode1(name):
    ctx = context(name)
    p = ctx.spec.pearson
    for n in range(1, ctx.n_max + 1):
        M = ctx.structure(n)
        assert st.ode1_residual_polycolumn(ctx.data, M.ML, p, n).is_zero()
        assert st.ode1_residual_seriescolumn(ctx.data, ctx.series, M.ML, p, n, ctx.K).is_zero()
        assert st.ode1_right_residual_polyrow(ctx.data, M.MR, p, n).is_zero()


def test_ode1_series_truncation_reported():
    ctx = context("scalar_a3_b1")
    from mbl.errors import TruncationTooShort
    with pytest.raises(TruncationTooShort):
        st.ode1_residual_seriescolumn(ctx.data, ctx.series, ctx.structure(2).ML, ctx.spec.pearson, 2, 100)


@pytest.mark.parametrize("name", MATRIX[:3])
def test_ode2(name):
    ctx = context(name)
    for n in range(1, 5):
        assert st.ode2_residual(ctx.data, ctx.structure(n).ML, ctx.spec.pearson, n).is_zero()


def test_ode2_detects_wrong_structure():
    ctx = context("classical_a3_b1_c1")
    assert not st.ode2_residual(ctx.data, ctx.structure(3).ML, ctx.spec.pearson, 2).is_zero()


def test_scalar_elimination():
    ctx = context("scalar_a3_b1")
    for n in range(1, 6):
        assert all(r.is_zero() for r in
                   st.scalar_elimination_residual(ctx.structure(n).ML, ctx.spec.pearson, n, ctx.spec.a_base))
