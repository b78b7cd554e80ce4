from __future__ import annotations

from fractions import Fraction

import pytest

from mbl.errors import ParameterDegenerate, TruncationTooShort
from mbl.exactnum import GaussianRational
from mbl.scalar_bessel import (check_scalar_recurrence, check_scalar_structure, expand_in_monic_basis,
                               gbp_coeffs, loop_norm_ratio, monic_bessel, scalar_coeff_table,
                               scalar_ode_residual_P, scalar_ode_residual_Q)

PARAMS = [(Fraction(3), GaussianRational(1)), (Fraction(5, 2), GaussianRational(2)),
          (Fraction(3), GaussianRational(1, 1))]
IDS = ["a3_b1", "a5h_b2", "a3_b1pi"]


def test_gbp_low_degree():
    # y_1(x; a, b) = 1 + a x / b
    assert gbp_coeffs(1, 3, 1) == [1, 3]
    assert gbp_coeffs(0, 3, 1) == [1]


def test_monic():
    for n in range(5):
        c = monic_bessel(n, 3, 1)
        assert len(c) == n + 1 and c[-1] == 1


def test_expand_round_trip():
    basis = [monic_bessel(k, 3, 1) for k in range(4)]
    p = [GaussianRational(x) for x in (2, -1, 5, 7)]
    c = expand_in_monic_basis(p, basis)
    back = [sum((c[k] * (basis[k][i] if i < len(basis[k]) else 0) for k in range(4)), GaussianRational(0))
            for i in range(4)]
    assert back == p


@pytest.mark.parametrize("a,b", PARAMS, ids=IDS)
def test_recurrence_and_structure(a, b):
    assert check_scalar_recurrence(6, a, b).passed
    assert check_scalar_structure(6, a, b).passed


def test_perturbed_table_fails():
    t = scalar_coeff_table(6, 3, 1)
    bad = t.replace(beta={2: t.beta[2] + Fraction(1, 1000)})
    assert not check_scalar_recurrence(6, 3, 1, bad).passed
    bad = t.replace(h={3: t.h[3] * 2})
    assert not check_scalar_structure(6, 3, 1, bad).passed


@pytest.mark.parametrize("a,b", PARAMS, ids=IDS)
def test_ode_P(a, b):
    for n in range(11):
        assert scalar_ode_residual_P(n, a, b).is_zero()


@pytest.mark.parametrize("a,b", PARAMS, ids=IDS)
def test_ode_Q(a, b):
    for n in range(5):
        assert scalar_ode_residual_Q(n, a, b, K=8).is_zero()


def test_ode_Q_detects_wrong_operator():
    assert not scalar_ode_residual_Q(2, 3, 1, K=6, a_ode=Fraction(7, 2)).is_zero()


def test_ode_Q_truncation_guard():
    with pytest.raises(TruncationTooShort):
        scalar_ode_residual_Q(1, 3, 1, K=0)


def test_loop_norm_small():
    assert loop_norm_ratio(0, 3, 1) == 1
    # monic P_1 = z + 1/a for z^(a-2) e^{-b/z}; norm ratio m2 - m1^2 type closed form
    assert loop_norm_ratio(1, 3, 1) != 0


def test_degenerate_parameters():
    with pytest.raises(ParameterDegenerate):
        scalar_coeff_table(3, -2, 1)
    with pytest.raises(ParameterDegenerate):
        loop_norm_ratio(1, 3, GaussianRational(-1))


@pytest.mark.parametrize("a,b", PARAMS, ids=IDS)
def test_loop_norm_matches_hankel(a, b):
    from mbl.scalar_bessel import _scalar_weight_mops
    data, _ = _scalar_weight_mops(8, a, b)
    for n in range(9):
        assert data.Cinv[n][0, 0] / data.Cinv[0][0, 0] == loop_norm_ratio(n, a, b)
