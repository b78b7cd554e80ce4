from __future__ import annotations

from fractions import Fraction

import pytest

from mbl.errors import RegularityFailure
from mbl.mops import (biorthogonality_check, p2_double_sum, recurrence_check, second_kind_recurrence_check,
                      solve_mops, subleading_sum_check)
from mbl.polymat import MatrixGR
from mbl.weights import MomentTable

from conftest import context

ALL = ["scalar_a3_b1", "scalar_a5h_b2", "scalar_a3_b1pi", "classical_a3_b1_c1", "classical_a5h_b2_c1t",
       "semiclassical_a3_b1_c1", "triangular_a3_b1_c1", "nonabelian_one_sided"]


@pytest.mark.parametrize("name", ALL)
def test_biorthogonality_and_recurrence(name):
    ctx = context(name)
    assert biorthogonality_check(ctx.data, ctx.table).passed
    assert recurrence_check(ctx.data).passed
    assert subleading_sum_check(ctx.data).passed
    assert second_kind_recurrence_check(ctx.series, ctx.data).passed


@pytest.mark.parametrize("name", ALL)
def test_monic_and_normalized(name):
    data = context(name).data
    for n in range(data.n_max + 2):
        assert data.P_L[n].degree == n and data.P_L[n].coeff(n) == MatrixGR.identity(data.N)
    for n in range(data.n_max + 1):
        assert data.Cinv[n].matmul(data.C[n]) == MatrixGR.identity(data.N)
        assert data.etaL[n] == (MatrixGR.zeros(data.N) if n == 0 else data.Cinv[n].matmul(data.C[n - 1]))
        assert data.xiR[n] == data.C[n].matmul(data.xiL[n]).matmul(data.Cinv[n])


def test_perturbed_recurrence_fails():
    data = context("classical_a3_b1_c1").data
    bump = data.xiL[3] + MatrixGR.scalar(2, Fraction(1, 10**6))
    assert not recurrence_check(data.perturbed(xiL={3: bump})).passed


def test_p2_readings():
    data = context("semiclassical_a3_b1_c1").data
    for n in range(data.n_max + 1):
        assert p2_double_sum(data, n, "ordered") == data.p2L(n)
    assert any(p2_double_sum(data, n, "full") != data.p2L(n) for n in range(data.n_max + 1))


def test_singular_hankel():
    # all moments equal: the 2x2 Hankel block is rank one
    table = MomentTable(tuple(MatrixGR.identity(1) for _ in range(8)))
    with pytest.raises(RegularityFailure):
        solve_mops(table, 2)


def test_json_shape():
    data = context("scalar_a3_b1").data
    j = data.to_json()
    assert len(j["xiL"]) == data.n_max + 1 and len(j["P_L"]) == data.n_max + 2
