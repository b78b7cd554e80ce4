from __future__ import annotations

from fractions import Fraction

import pytest

from mbl.errors import NonAbelianInput, OneSidedRequired
from mbl.painleve import (commutative_reduction, dpiv_report, dpiv_residuals, dpiv_state,
                          example_block_relations)
from mbl.polymat import MatrixGR

from conftest import context

ONE_SIDED = ["scalar_a3_b1", "triangular_a3_b1_c1", "nonabelian_one_sided"]


def _zero(pair):
    return all(m.is_zero() for m in pair)


@pytest.mark.parametrize("name", ONE_SIDED)
def test_nonabelian_form_holds(name):
    ctx = context(name)
    state = dpiv_state(ctx.data)
    for n in range(0, ctx.n_max):
        assert _zero(dpiv_residuals(state, ctx.spec.pearson, n))
    assert dpiv_report(state, ctx.spec.pearson, 1, ctx.n_max - 1).passed


@pytest.mark.parametrize("name", ["scalar_a3_b1", "triangular_a3_b1_c1"])
def test_corrected_form_in_commutative_cases(name):
    ctx = context(name)
    state = dpiv_state(ctx.data)
    for n in range(1, ctx.n_max):
        assert _zero(dpiv_residuals(state, ctx.spec.pearson, n, form="corrected"))


def test_corrected_form_fails_non_abelian():
    ctx = context("nonabelian_one_sided")
    state = dpiv_state(ctx.data)
    assert not all(_zero(dpiv_residuals(state, ctx.spec.pearson, n, form="corrected"))
                   for n in range(1, ctx.n_max))


def test_literal_form_fails_scalar():
    ctx = context("scalar_a3_b1")
    state = dpiv_state(ctx.data)
    assert not _zero(dpiv_residuals(state, ctx.spec.pearson, 2, form="literal"))


def test_perturbed_eta_detected():
    ctx = context("triangular_a3_b1_c1")
    bump = ctx.data.etaL[3] + MatrixGR.scalar(2, Fraction(1, 1000))
    state = dpiv_state(ctx.data.perturbed(etaL={3: bump}))
    assert not _zero(dpiv_residuals(state, ctx.spec.pearson, 3))
    assert not commutative_reduction(state, ctx.spec.pearson, 1, ctx.n_max - 1).passed


def test_two_sided_rejected():
    ctx = context("classical_a3_b1_c1")
    state = dpiv_state(ctx.data)
    with pytest.raises(OneSidedRequired):
        dpiv_residuals(state, ctx.spec.pearson, 1)
    assert dpiv_report(state, ctx.spec.pearson, 1, 3).skipped.startswith("hypothesis not met")


@pytest.mark.parametrize("name", ["scalar_a3_b1", "triangular_a3_b1_c1"])
def test_commutative_reduction(name):
    ctx = context(name)
    r = commutative_reduction(dpiv_state(ctx.data), ctx.spec.pearson, 1, ctx.n_max - 1)
    assert r.skipped is None and r.passed and r.entries


def test_commutative_reduction_non_abelian():
    ctx = context("nonabelian_one_sided")
    state = dpiv_state(ctx.data)
    assert commutative_reduction(state, ctx.spec.pearson, 1, 3).skipped is not None
    with pytest.raises(NonAbelianInput):
        commutative_reduction(state, ctx.spec.pearson, 1, 3, strict=True)


@pytest.mark.parametrize("name", ["semiclassical_a3_b1_c1", "classical_a3_b1_c1", "nonabelian_one_sided"])
def test_block_relations(name):
    ctx = context(name)
    M = {n: ctx.structure(n).ML for n in range(ctx.n_max + 1)}
    r = example_block_relations(M, ctx.data, 2, ctx.n_max)
    assert r.passed
    assert not all(e.passed for e in r.section("literal"))
