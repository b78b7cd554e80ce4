"""Transfer matrices, structure matrices and the identities linking them.

Notation: ``Y_n`` is the left fundamental matrix

    Y_n = [[P_n,            Q_n          ],
           [-C_{n-1} P_{n-1}, -C_{n-1} Q_{n-1}]]

(with ``Y_0 = [[I, Q_0], [0, I]]``), ``D = diag(h^L(z), -h^R(z))`` and
``M~_n = z^2 M_n`` the structure matrix, so that ``z^2 Y_n' + Y_n D = M~_n Y_n``.

``M~_n`` is built three ways: the classical entry formulas, the quadratic
(semiclassical) entry formulas, and directly from the definition
``(z^2 Y_n' + Y_n D) Y_n^{-1}`` on exact Laurent tails.  The last one uses
``Y_n^{-1}`` written through the right family and never touches the entry
formulas, so it serves as the oracle for the other two.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TruncationTooShort
from .mops import MopsData, SecondKindSeries
from .polymat import BlockMatrix, LaurentTail, MatPoly, MatrixGR, commutator, j_block
from .report import ResidualReport
from .weights import PearsonData

__all__ = [
    "TransferMat",
    "StructureMat",
    "build_transfer",
    "fundamental_left",
    "fundamental_left_inverse",
    "structure_classical",
    "structure_semiclassical",
    "structure_general",
    "structure_from_definition",
    "right_from_left",
    "zero_curvature_residual",
    "zero_curvature_right_residual",
    "ode1_residual_polycolumn",
    "ode1_residual_seriescolumn",
    "ode1_right_residual_polyrow",
    "miura_image",
    "ode2_residual",
    "scalar_elimination_residual",
    "degree_of",
]


def _poly(m) -> MatPoly:
    return m if isinstance(m, MatPoly) else MatPoly.constant(m)


def _lin(c0: MatrixGR, c1: MatrixGR) -> MatPoly:
    return MatPoly([c0, c1], c0.shape)


def degree_of(M: BlockMatrix) -> int:
    return max(_poly(b).degree for row in M.blocks for b in row)


@dataclass(frozen=True)
class TransferMat:
    n: int
    TL: BlockMatrix
    TR: BlockMatrix


@dataclass(frozen=True)
class StructureMat:
    """``M~^L_n`` with ``M~^R_n = J M~^L_n J``; ``convention`` marks use of ``C_{-1} := 0``."""

    n: int
    ML: BlockMatrix
    MR: BlockMatrix
    convention: bool = False
    source: str = ""


def right_from_left(ML: BlockMatrix) -> BlockMatrix:
    J = j_block(ML[0, 0].shape[0])
    return (J * ML * J).map(_poly)


def build_transfer(data: MopsData, n: int) -> TransferMat:
    """``T^L_n = [[zI - xi^L_n, C_n^{-1}], [-C_n, 0]]``, ``T^R_n = [[zI - xi^R_n, -C_n], [C_n^{-1}, 0]]``."""
    N = data.N
    eye, zero = MatrixGR.identity(N), MatrixGR.zeros(N)
    tl = BlockMatrix([[_lin(-data.xiL[n], eye), _poly(data.Cinv[n])],
                      [_poly(-data.C[n]), _poly(zero)]])
    tr = BlockMatrix([[_lin(-data.xiR[n], eye), _poly(-data.C[n])],
                      [_poly(data.Cinv[n]), _poly(zero)]])
    return TransferMat(n, tl, tr)


# -- fundamental matrices ---------------------------------------------------------

def fundamental_left(data: MopsData, series: SecondKindSeries, n: int) -> BlockMatrix:
    N = data.N
    if n == 0:
        return BlockMatrix([[_poly(MatrixGR.identity(N)), series.QL[0]],
                            [_poly(MatrixGR.zeros(N)), _poly(MatrixGR.identity(N))]])
    c = data.C[n - 1]
    return BlockMatrix([[data.P_L[n], series.QL[n]],
                        [-c * data.P_L[n - 1], -c * series.QL[n - 1]]])


def fundamental_left_inverse(data: MopsData, series: SecondKindSeries, n: int) -> BlockMatrix:
    """``Y_n^{-1} = [[-Q^R_{n-1} C_{n-1}, -Q^R_n], [P^R_{n-1} C_{n-1}, P^R_n]]``."""
    N = data.N
    if n == 0:
        return BlockMatrix([[_poly(MatrixGR.identity(N)), -series.QR[0]],
                            [_poly(MatrixGR.zeros(N)), _poly(MatrixGR.identity(N))]])
    c = data.C[n - 1]
    return BlockMatrix([[-(series.QR[n - 1] * c), -series.QR[n]],
                        [data.P_R[n - 1] * c, data.P_R[n]]])


def _D(pearson: PearsonData) -> BlockMatrix:
    N = pearson.N
    o = MatPoly.zero(N)
    return BlockMatrix([[pearson.hL_poly(), o], [o, -pearson.hR_poly()]])


def structure_from_definition(data: MopsData, series: SecondKindSeries, pearson: PearsonData,
                              n: int) -> tuple[StructureMat, list[int]]:
    """``M~_n = (z^2 Y_n' + Y_n D) Y_n^{-1}`` on Laurent tails.

    Returns the polynomial part and the list of negative exponents (within the
    known range) whose coefficients fail to vanish; a correct structure matrix
    has none.
    """
    Y = fundamental_left(data, series, n)
    Yi = fundamental_left_inverse(data, series, n)
    lhs = Y.derivative().mul_z(2) + Y * _D(pearson)
    prod = lhs * Yi
    blocks, bad = [], []
    for row in prod.blocks:
        out_row = []
        for b in row:
            s = LaurentTail.coerce(b)
            if s.known_from is not None and s.known_from > 0:
                raise TruncationTooShort(f"structure matrix at n={n}: series known only from z^{s.known_from}")
            bad.extend(e for e in s.nonzero_exponents() if e < 0)
            out_row.append(s.polynomial_part())
        blocks.append(out_row)
    ML = BlockMatrix(blocks)
    return StructureMat(n, ML, right_from_left(ML), source="definition"), sorted(set(bad))


# -- entry formulas ---------------------------------------------------------------

def structure_classical(data: MopsData, pearson: PearsonData, n: int) -> StructureMat:
    """Degree-one entries for ``h(z) = A z + B`` on each side.

    At ``n = 0`` the lower-left block uses ``C_{-1} := 0`` (flagged).
    """
    if not pearson.classical:
        raise ValueError("structure_classical needs h2 = 0 on both sides")
    N = data.N
    eye = MatrixGR.identity(N)
    AL, BL = pearson.hL[1], pearson.hL[0]
    AR, BR = pearson.hR[1], pearson.hR[0]
    p1L, p1R = data.p1L(n), data.p1R(n)
    cinv = data.Cinv[n]
    cm = data.C_conv(n - 1)
    m11 = _lin(commutator(p1L, AL) - p1L + BL, AL + eye.scale(n))
    m12 = _poly(AL.matmul(cinv) + cinv.matmul(AR) + cinv.scale(2 * n + 1))
    m21 = _poly(-cm.matmul(AL) - AR.matmul(cm) - cm.scale(2 * n - 1))
    m22 = _lin(commutator(p1R, AR) + p1R - BR, -(AR + eye.scale(n)))
    ML = BlockMatrix([[m11, m12], [m21, m22]])
    return StructureMat(n, ML, right_from_left(ML), convention=(n == 0), source="classical")


def structure_semiclassical(data: MopsData, pearson: PearsonData, n: int,
                            literal: bool = False) -> StructureMat:
    """Degree-two entries for quadratic Pearson data (entries use ``p^1_{n+1}``).

    The constant terms of the diagonal blocks carry ``h2^L ((p^1_{L,n})^2 + eta^L_n)``
    and ``-((p^1_{R,n})^2 + eta^R_n) h2^R``; these come from the ``z^-2``
    coefficient of ``P_n z^-n (-Q^R_{n-1} C_{n-1}) = I + O(z^-2)``.
    ``literal=True`` drops them (the form without these two terms).
    """
    N = data.N
    eye = MatrixGR.identity(N)
    h0L, h1L, h2L = pearson.hL
    h0R, h1R, h2R = pearson.hR
    p1L, p2L, p1L1 = data.p1L(n), data.p2L(n), data.p1L(n + 1)
    p1R, p2R, p1R1 = data.p1R(n), data.p2R(n), data.p1R(n + 1)
    p1Lm, p1Rm = data.p1L(n - 1), data.p1R(n - 1)
    cinv = data.Cinv[n]
    cm = data.C_conv(n - 1)
    mm = MatrixGR.matmul

    if literal or n == 0:
        extraL = extraR = MatrixGR.zeros(N)
    else:
        extraL = mm(h2L, mm(p1L, p1L) + data.etaL[n])
        extraR = mm(mm(p1R, p1R) + data.etaR[n], h2R)
    m11 = (MatPoly([mm(mm(cinv, h2R), cm) + h0L + commutator(p1L, h1L) + commutator(p2L, h2L)
                    - mm(mm(p1L, h2L), p1L) - p1L + extraL,
                    h1L + eye.scale(n) + commutator(p1L, h2L),
                    h2L], (N, N)))
    m12 = (_lin(h1L - mm(h2L, p1L1) + mm(p1L, h2L), h2L) * cinv
           + cinv * _lin(h1R + mm(h2R, p1R) - mm(p1R1, h2R), h2R)
           + _poly(cinv.scale(2 * n + 1)))
    m21 = (-cm * _lin(h1L - mm(h2L, p1L) + mm(p1Lm, h2L), h2L)
           - _lin(h1R + mm(h2R, p1Rm) - mm(p1R, h2R), h2R) * cm
           - _poly(cm.scale(2 * n - 1)))
    m22 = MatPoly([-mm(mm(cm, h2L), cinv) - h0R + commutator(p1R, h1R) + commutator(p2R, h2R)
                   + mm(mm(p1R, h2R), p1R) + p1R - extraR,
                   -h1R - eye.scale(n) - commutator(h2R, p1R),
                   -h2R], (N, N))
    ML = BlockMatrix([[m11, m12], [m21, m22]])
    return StructureMat(n, ML, right_from_left(ML), convention=(n == 0),
                        source="semiclassical-literal" if literal else "semiclassical")


def structure_general(data: MopsData, pearson: PearsonData, n: int) -> StructureMat:
    if pearson.classical:
        return structure_classical(data, pearson, n)
    return structure_semiclassical(data, pearson, n)


# -- identities -------------------------------------------------------------------

def zero_curvature_residual(M_n: BlockMatrix, M_n1: BlockMatrix, T_n: BlockMatrix) -> MatPoly:
    """``z^2 T_n' - M~_{n+1} T_n + T_n M~_n`` (left form)."""
    r = T_n.derivative().mul_z(2) - M_n1 * T_n + T_n * M_n
    return r.assemble()


def zero_curvature_right_residual(MR_n: BlockMatrix, MR_n1: BlockMatrix, TR_n: BlockMatrix) -> MatPoly:
    """``z^2 (T^R_n)' - T^R_n M~^R_{n+1} + M~^R_n T^R_n``."""
    r = TR_n.derivative().mul_z(2) - TR_n * MR_n1 + MR_n * TR_n
    return r.assemble()


def _left_column(data: MopsData, n: int) -> BlockMatrix:
    cm = data.C_conv(n - 1)
    return BlockMatrix([[data.P_L[n]], [cm * data.PL(n - 1) * -1]])


def ode1_residual_polycolumn(data: MopsData, Mtilde: BlockMatrix, pearson: PearsonData, n: int) -> MatPoly:
    """``z^2 Y1' + Y1 h^L - M~_n Y1`` for ``Y1 = [P_n; -C_{n-1} P_{n-1}]``."""
    y = _left_column(data, n)
    hl = pearson.hL_poly()
    r = y.derivative().mul_z(2) + y.map(lambda b: b * hl) - Mtilde * y
    return r.assemble()


def ode1_residual_seriescolumn(data: MopsData, series: SecondKindSeries, Mtilde: BlockMatrix,
                               pearson: PearsonData, n: int, K: int) -> LaurentTail:
    """``z^2 Y2' - Y2 h^R - M~_n Y2`` for ``Y2 = [Q_n; -C_{n-1} Q_{n-1}]``, checked through ``z^-(n+K)``."""
    if n < 1:
        raise ValueError("series column needs n >= 1 (C_{-1} is not defined)")
    c = data.C[n - 1]
    y = BlockMatrix([[series.QL[n]], [-(c * series.QL[n - 1])]])
    hr = pearson.hR_poly()
    r = (y.derivative().mul_z(2) - y.map(lambda b: b * hr) - Mtilde * y).assemble()
    need = -(n + K)
    if r.known_from is not None and r.known_from > need:
        raise TruncationTooShort(f"series column at n={n} known only from z^{r.known_from}, need z^{need}")
    return r.truncate_below(need)


def ode1_right_residual_polyrow(data: MopsData, MR: BlockMatrix, pearson: PearsonData, n: int) -> MatPoly:
    """``z^2 X' + h^R X - X M~^R_n`` for the right row ``X = [P^R_n, -P^R_{n-1} C_{n-1}]``."""
    cm = data.C_conv(n - 1)
    x = BlockMatrix([[data.P_R[n], data.PR(n - 1) * cm * -1]])
    hr = pearson.hR_poly()
    r = x.derivative().mul_z(2) + x.map(lambda b: hr * b) - x * MR
    return r.assemble()


def miura_image(F: BlockMatrix) -> BlockMatrix:
    """``z^2 B(F) = z^2 F' + F^2`` (denominator of the Miura-like map cleared)."""
    return (F.derivative().mul_z(2) + F * F).map(_poly)


def ode2_residual(data: MopsData, Mtilde: BlockMatrix, pearson: PearsonData, n: int) -> MatPoly:
    """Second-order system on ``Y1 = [P_n; -C_{n-1} P_{n-1}]`` times ``z^2``:

    ``z^4 Y1'' + z^2 Y1' (2 h^L + 2z) + Y1 (z^2 h^L' + (h^L)^2) - z^2 B(M~_n) Y1``.
    """
    y = _left_column(data, n)
    hl = pearson.hL_poly()
    N = data.N
    two_h_z = hl * 2 + MatPoly.monomial(MatrixGR.identity(N).scale(2), 1)
    bh = hl.derivative().mul_z(2) + hl * hl
    y1 = y.derivative()
    r = (y1.derivative().mul_z(4) + y1.mul_z(2).map(lambda b: b * two_h_z)
         + y.map(lambda b: b * bh) - miura_image(Mtilde) * y)
    return r.assemble()


def scalar_elimination_residual(Mtilde: BlockMatrix, pearson: PearsonData, n: int, a) -> list[MatPoly]:
    """Eliminate ``P_{n-1}`` between the two scalar first-order rows.

    With ``X = z^2 B(M~)`` and the first row solved for ``-C_{n-1} P_{n-1}``,
    the second-order equation for ``P_n`` has coefficients
    ``(z^4, z^2(2h + 2z) - z^2 X12/M12, z^2 h' + h^2 - X11 - X12 (h - M11)/M12)``,
    which must equal ``z^2`` times ``(z^2, a z + b, -n(a+n-1))``.  Returns the
    residuals of the two non-trivial coefficients.
    """
    from .exactnum import as_rational

    a = as_rational(a)
    h = pearson.hL_poly()
    X = miura_image(Mtilde)
    m12 = _poly(Mtilde[0, 1])
    if m12.degree != 0:
        raise ValueError("elimination expects a constant (1,2) entry")
    inv = m12.coeff(0).inverse()
    m11 = _poly(Mtilde[0, 0])
    x11, x12 = _poly(X[0, 0]), _poly(X[0, 1])
    z2 = MatPoly.monomial(MatrixGR.identity(1), 2)
    c1 = (h * 2 + MatPoly.monomial(MatrixGR.identity(1).scale(2), 1)).mul_z(2) - (x12 * inv).mul_z(2)
    c0 = h.derivative().mul_z(2) + h * h - x11 - x12 * inv * (h - m11)
    hb = pearson.hL[0] + pearson.hR[0]
    want1 = MatPoly([hb, MatrixGR.scalar(1, a)], (1, 1)).mul_z(2)
    want0 = z2 * (-(n * (a + n - 1)))
    return [c1 - want1, c0 - want0]
