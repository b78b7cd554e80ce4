from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from mbl.errors import ShapeError, SingularMatrix
from mbl.exactnum import GaussianRational
from mbl.polymat import (BlockMatrix, LaurentTail, MatPoly, MatrixGR, bareiss_det, bareiss_solve,
                         commutator, mat_inverse)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
entries = st.builds(GaussianRational, small, small)


def square(n):
    return st.lists(entries, min_size=n * n, max_size=n * n).map(lambda e: MatrixGR(n, n, e))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(square))
def test_inverse_round_trip(m):
    assume(not bareiss_det(m).is_zero())
    assert m.matmul(mat_inverse(m)) == MatrixGR.identity(m.n_rows)


@settings(max_examples=40, deadline=None)
@given(square(3), square(3))
def test_det_multiplicative(a, b):
    assert bareiss_det(a.matmul(b)) == bareiss_det(a) * bareiss_det(b)


@settings(max_examples=30, deadline=None)
@given(square(3), st.lists(entries, min_size=6, max_size=6))
def test_solve(a, rhs):
    assume(not bareiss_det(a).is_zero())
    b = MatrixGR(3, 2, rhs)
    assert a.matmul(bareiss_solve(a, b)) == b


def test_det_known():
    m = MatrixGR.from_rows([[2, 1], [1, 1]])
    assert bareiss_det(m) == 1
    assert bareiss_det(MatrixGR.from_rows([[1, 2], [2, 4]])) == 0


def test_singular_raises():
    with pytest.raises(SingularMatrix):
        mat_inverse(MatrixGR.from_rows([[1, 2], [2, 4]]))
    with pytest.raises(SingularMatrix):
        mat_inverse(MatrixGR.zeros(1))


def test_shape_errors():
    with pytest.raises(ShapeError):
        MatrixGR.identity(2) + MatrixGR.identity(3)
    with pytest.raises(ShapeError):
        mat_inverse(MatrixGR.zeros(2, 3))


def test_commutator():
    d1, d2 = MatrixGR.diag([1, 2]), MatrixGR.diag([3, 5])
    assert commutator(d1, d2).is_zero()
    n = MatrixGR.from_rows([[0, 1], [0, 0]])
    assert commutator(d1, n) == MatrixGR.from_rows([[0, -1], [0, 0]])


@settings(max_examples=30, deadline=None)
@given(st.lists(square(2), min_size=1, max_size=4), st.lists(square(2), min_size=1, max_size=4))
def test_product_rule(pc, qc):
    p, q = MatPoly(pc, (2, 2)), MatPoly(qc, (2, 2))
    assert (p * q).derivative() == p.derivative() * q + p * q.derivative()


def test_matpoly_basics():
    p = MatPoly.from_scalar_coeffs([1, 0, 3])  # 1 + 3 z^2
    assert p.degree == 2
    assert p.derivative() == MatPoly.from_scalar_coeffs([0, 6])
    assert p.evaluate(Fraction(2)) == MatrixGR.scalar(1, 13)
    assert p.mul_z(1) == MatPoly.from_scalar_coeffs([0, 1, 0, 3])
    assert MatPoly.zero(2).is_zero() and MatPoly.zero(2).degree < 0


def test_from_entry_coeffs():
    p = MatPoly.from_entry_coeffs([[[1], [0, 2]], [[0], [1]]])
    assert p.coeff(0) == MatrixGR.identity(2)
    assert p.coeff(1) == MatrixGR.from_rows([[0, 2], [0, 0]])


def test_laurent_precision_propagates():
    one = MatrixGR.identity(1)
    s = LaurentTail({-1: one, -2: one}, (1, 1), -3)
    z = MatPoly.monomial(one, 1)
    prod = s * z
    assert prod.known_from == -2
    assert prod.coeff(0) == one
    with pytest.raises(ValueError):
        prod.coeff(-3)


def test_laurent_truncate_and_poly_part():
    one = MatrixGR.identity(1)
    s = LaurentTail({2: one, 0: one, -1: one, -4: one}, (1, 1), -5)
    assert s.polynomial_part() == MatPoly.from_scalar_coeffs([1, 0, 1])
    assert sorted(s.truncate_below(-2).nonzero_exponents()) == [-1, 0, 2]


def test_block_assemble():
    i2 = MatrixGR.identity(2)
    b = BlockMatrix([[MatPoly.constant(i2), MatPoly.zero(2)], [MatPoly.zero(2), MatPoly.monomial(i2, 1)]])
    a = b.assemble()
    assert a.shape == (4, 4) and a.degree == 1
    assert (b * b).assemble() == MatPoly([MatrixGR.diag([1, 1, 0, 0]), MatrixGR.zeros(4),
                                          MatrixGR.diag([0, 0, 1, 1])], (4, 4))


def test_json_round_trip():
    m = MatrixGR.from_rows([[GaussianRational(1, 2), 3], [0, GaussianRational(0, -1)]])
    assert MatrixGR.from_json(m.to_json()) == m
    p = MatPoly([m, m.scale(2)], (2, 2))
    assert MatPoly.from_json(p.to_json()) == p
