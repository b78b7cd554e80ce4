from __future__ import annotations

from fractions import Fraction

import pytest

from mbl.errors import ParameterDegenerate, ParseError, PearsonMismatch
from mbl.exactnum import GaussianRational
from mbl.polymat import MatPoly, MatrixGR
from mbl.weights import (PearsonData, WeightSpec, format_weight_spec, load_weight_spec, matrix_moment_table,
                         pearson_moment_residual, pearson_polynomial_residual, scalar_moment_table,
                         stieltjes_series)

from conftest import SPECS


def test_scalar_moments_recurrence():
    m = scalar_moment_table(1, 1, 4)  # a = 3
    assert m == [1, Fraction(-1, 3), Fraction(1, 12), Fraction(-1, 60), Fraction(1, 360)]


def test_scalar_moments_degenerate():
    with pytest.raises(ParameterDegenerate):
        scalar_moment_table(-3, 1, 3)


def test_matrix_moments_combine_scalar_ones():
    spec = WeightSpec(2, Fraction(1), GaussianRational(1), MatPoly.from_entry_coeffs([[[1], [0, 1]], [[0], [1]]]))
    t = matrix_moment_table(spec, 3)
    m = scalar_moment_table(1, 1, 4)
    assert len(t) == 4
    assert t[2] == MatrixGR.from_rows([[m[2], m[3]], [0, m[2]]])


@pytest.mark.parametrize("path", sorted(SPECS.glob("*.wspec")), ids=lambda p: p.stem)
def test_shipped_specs_round_trip_and_pearson(path):
    spec = load_weight_spec(path)
    again = load_weight_spec(path)
    assert format_weight_spec(spec) == format_weight_spec(again)
    assert pearson_polynomial_residual(spec).is_zero()
    assert pearson_moment_residual(spec, matrix_moment_table(spec, 12)).passed


def test_parse_error_has_location(tmp_path):
    p = tmp_path / "bad.wspec"
    p.write_text("dim 1\nalpha 1//2\nbeta 1\nphi[0][0] = 1\n")
    with pytest.raises(ParseError) as exc:
        load_weight_spec(p)
    assert exc.value.line == 2


@pytest.mark.parametrize("text,msg", [
    ("alpha 1\nbeta 1\nphi[0][0] = 1\n", "dim"),
    ("dim 1\nalpha 1\nbeta -1\nphi[0][0] = 1\n", "positive"),
    ("dim 1\nalpha 1\nbeta 1\nphi[0][0] = 0\n", "zero"),
    ("dim 1\nalpha 1\nbeta 1\nphi[1][0] = 1\n", "outside"),
    ("dim 1\nalpha 1\nbeta 1\nphi[0][0] = 1\nbogus line\n", "unrecognized"),
])
def test_parse_rejects(tmp_path, text, msg):
    from mbl.weights import parse_weight_spec
    with pytest.raises(ParseError, match=msg):
        parse_weight_spec(text)


def test_pearson_mismatch_detected():
    from mbl.weights import parse_weight_spec
    with pytest.raises(PearsonMismatch) as exc:
        parse_weight_spec("dim 1\nalpha 1\nbeta 1\nphi[0][0] = 1\nhL0 = [[1]]\nhL1 = [[2]]\n")
    assert not exc.value.residual.is_zero()


def test_pearson_moment_residual_control():
    spec = load_weight_spec(SPECS / "classical_a3_b1_c1.wspec")
    table = matrix_moment_table(spec, 10)
    bumped = spec.pearson.shifted("L", 0, MatrixGR.scalar(2, Fraction(1, 100)))
    assert pearson_moment_residual(spec, table).passed
    assert not pearson_moment_residual(spec, table, pearson=bumped).passed


def test_no_pearson_skips():
    spec = WeightSpec(1, Fraction(1), GaussianRational(1), MatPoly.from_scalar_coeffs([1]))
    r = pearson_moment_residual(spec, matrix_moment_table(spec, 4))
    assert r.skipped is not None


def test_stieltjes_series():
    spec = load_weight_spec(SPECS / "scalar_a3_b1.wspec")
    t = matrix_moment_table(spec, 4)
    s = stieltjes_series(t, 3)
    assert s.known_from == -4
    assert s.coeff(-1) == -t[0] and s.coeff(-4) == -t[3]
