"""Closed forms for the two 2x2 Bessel-type examples.

Both examples express the monic MOPs through the scalar monic family ``B_n``
(orthogonal for ``z^a exp(-b/z)``):

    P_n = B_n I + bt_n B_{n-1} + ct_n B_{n-2},   bt_n = a_n^{-1} b_n,  ct_n = a_n^{-1} c_n

The *classical* example has Pearson data ``h(z) = A z + B`` on both sides
(``h^R = (h^L)^T``); the *semiclassical* one has ``h(z) = h2 z^2 + h1 z + h0``
with nilpotent ``h2``.  Each class also assembles the structure matrix from
the ``r, s, t (, u)`` expansion of ``z^2 P_n' + P_n h^L`` in the MOP basis,
which gives a second construction of ``M~_n`` independent of the general
entry formulas in :mod:`mbl.structure`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import ZERO, GaussianRational, as_gr, as_rational
from .polymat import BlockMatrix, MatPoly, MatrixGR, mat_inverse
from .scalar_bessel import monic_bessel, scalar_coeff_table
from .weights import PearsonData, WeightSpec

__all__ = ["ClassicalExample", "SemiclassicalExample", "TriangularExample"]

_I2 = MatrixGR.identity(2)
_O2 = MatrixGR.zeros(2)


def _m(rows) -> MatrixGR:
    return MatrixGR.from_rows(rows)


def _zI_minus(x: MatrixGR) -> MatPoly:
    return MatPoly([-x, _I2], (2, 2))


@dataclass
class _Base:
    a: Fraction
    b: GaussianRational
    c: GaussianRational
    n_max: int = 8
    _tab: object = field(default=None, repr=False)

    def __post_init__(self):
        self.a = as_rational(self.a)
        self.b = as_gr(self.b)
        self.c = as_gr(self.c)
        self._tab = scalar_coeff_table(self.n_max + 4, self.a, self.b)
        self._cache: dict = {}

    # scalar tables, zero at negative index ---------------------------------------
    def beta(self, n: int) -> GaussianRational:
        return self._tab.beta[n] if n >= 0 else ZERO

    def gamma(self, n: int) -> GaussianRational:
        return self._tab.gamma[n] if n >= 0 else ZERO

    def g(self, n: int) -> GaussianRational:
        return self._tab.g[n] if n >= 0 else ZERO

    def h(self, n: int) -> GaussianRational:
        return self._tab.h[n] if n >= 0 else ZERO

    def B(self, n: int) -> MatPoly:
        """``B_n I``."""
        if n < 0:
            return MatPoly.zero(2)
        return MatPoly.scalar_times(monic_bessel(n, self.a, self.b), 2)

    # a_n, b_n, c_n supplied by subclasses -----------------------------------------
    def an(self, n: int) -> MatrixGR:
        raise NotImplementedError

    def bn(self, n: int) -> MatrixGR:
        raise NotImplementedError

    def cn(self, n: int) -> MatrixGR:
        raise NotImplementedError

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def bt(self, n: int) -> MatrixGR:
        if n < 0:
            return _O2
        return self._memo(("bt", n), lambda: mat_inverse(self.an(n)).matmul(self.bn(n)))

    def ct(self, n: int) -> MatrixGR:
        if n < 0:
            return _O2
        return self._memo(("ct", n), lambda: mat_inverse(self.an(n)).matmul(self.cn(n)))

    def P(self, n: int) -> MatPoly:
        """Monic MOP from the closed form."""
        return self.B(n) + self.bt(n) * self.B(n - 1) + self.ct(n) * self.B(n - 2)

    def xi(self, n: int) -> MatrixGR:
        return _I2.scale(self.beta(n)) + self.bt(n) - self.bt(n + 1)

    def eta(self, n: int) -> MatrixGR:
        return (_I2.scale(self.gamma(n)) + self.bt(n).scale(self.beta(n - 1)) + self.ct(n)
                - self.ct(n + 1) - self.xi(n).matmul(self.bt(n)))

    def _eta_inv_term(self, coeff: MatrixGR, n: int) -> MatrixGR:
        """``coeff eta_n^{-1}``, standing for ``coeff P_{n-1}`` rewritten through the recurrence.

        Zero for ``n <= 0`` (``P_{-1} = 0``) or when ``coeff`` vanishes.
        """
        if n <= 0 or coeff.is_zero():
            return _O2
        return coeff.matmul(mat_inverse(self.eta(n)))


class ClassicalExample(_Base):
    """Weight ``[[k^2 z^2, c z], [c z, 1]] z^(a-2) exp(-b/z)``, ``k^2 = a(a+1)/b^2 + c^2``.

    Factorization ``W = W_L W_L^T``, ``W_L = [[k0 z, c z], [0, 1]] z^((a-2)/2) exp(-b/(2z))``
    with ``k0^2 = a(a+1)/b^2`` (only ``k0^2`` enters ``W``),
    ``z^2 W_L' = (A z + B) W_L`` with ``A = diag(a/2, (a-2)/2)``, ``B = (b/2) I``.
    """

    def A(self) -> MatrixGR:
        return MatrixGR.diag([self.a / 2, (self.a - 2) / 2])

    def Bmat(self) -> MatrixGR:
        return _I2.scale(self.b / 2)

    def weight(self, variant: str = "normalized") -> WeightSpec:
        """The example as a WeightSpec.

        ``variant``:
          ``"normalized"``  Phi_11 = (a(a+1)/b^2 + c^2) z^2: the ``z^a`` part carries its
                            own loop normalization (zeroth moment 1); the closed forms hold here.
          ``"raw"``         Phi_11 = (1 + c^2) z^2 with both parts sharing one normalization.
          ``"constant"``    off-diagonal ``c`` instead of ``c z`` (no Pearson equation).
        """
        a, b, c = self.a, self.b, self.c
        off = [c] if variant == "constant" else [ZERO, c]
        lead = (a * (a + 1) / (b * b) + c * c) if variant == "normalized" else 1 + c * c
        phi = MatPoly.from_entry_coeffs([[[ZERO, ZERO, lead], off], [off, [1]]])
        hl = (self.Bmat(), self.A(), _O2)
        pearson = PearsonData(hl, tuple(m.transpose() for m in hl))
        return WeightSpec(2, a - 2, b, phi, pearson, name="classical_2x2",
                          params={"a": a, "b": b, "c": c})

    def an(self, n):
        a, b, c = self.a, self.b, self.c
        return _m([[1, b * c / (a + 2 * n)], [0, a * (a + 1) * (a + n - 1) - b * b * c * c * n]])

    def bn(self, n):
        a, b, c = self.a, self.b, self.c
        if n <= 0:
            return _O2
        e12 = b * b * c * n / ((a + 2 * n - 1) * (a + 2 * n) ** 2)
        e22 = a * b * n * (2 * a * (a + n) + b * b * c * c + 2 * n - 2) / ((a + 2 * n - 2) * (a + 2 * n))
        return _m([[0, e12], [b * b * c * n, e22]])

    def cn(self, n):
        a, b, c = self.a, self.b, self.c
        if n <= 1:
            return _O2
        alpha = (b * b * (n - 1) * n * (a + n - 1) * (a * a + a + b * b * c * c)
                 / ((a + 2 * n - 3) * (a + 2 * n - 2) ** 2 * (a + 2 * n - 1)))
        return _m([[0, 0], [0, alpha]])

    # structure expansion ---------------------------------------------------------
    def r(self, n):
        return _I2.scale(n) + self.A()

    def s(self, n):
        A = self.A()
        return (_I2.scale(self.b / 2 + self.g(n)) + self.bt(n).scale(n - 1)
                + (_I2.scale(self.beta(n)) + self.bt(n)).matmul(A) - self.r(n).matmul(self.bt(n + 1)))

    def t(self, n):
        A = self.A()
        inner = _I2.scale(self.gamma(n)) + self.bt(n).scale(self.beta(n - 1)) + self.ct(n)
        return (_I2.scale(self.h(n)) + self.bt(n).scale(self.g(n - 1) + self.b / 2)
                + self.ct(n).scale(n - 2) + inner.matmul(A) - self.r(n).matmul(self.ct(n + 1))
                - self.s(n).matmul(self.bt(n)))

    def t_displayed(self, n):
        """``t_n`` exactly as displayed, without the ``- s_n bt_n`` term (kept for the report)."""
        return self.t(n) + self.s(n).matmul(self.bt(n))

    def structure_expansion_residual(self, n: int) -> MatPoly:
        """``z^2 P_n' + P_n (A z + B) - r_n P_{n+1} - s_n P_n - t_n P_{n-1}``."""
        h = MatPoly([self.Bmat(), self.A()], (2, 2))
        P = self.P
        return (P(n).derivative().mul_z(2) + P(n) * h - self.r(n) * P(n + 1)
                - self.s(n) * P(n) - self.t(n) * P(n - 1))

    def Mtilde(self, n: int, C: MatrixGR, Cinv: MatrixGR) -> BlockMatrix:
        """Structure matrix assembled from ``r, s, t``; ``C = C_{n-1}``, ``n >= 1``."""
        r, s, t, xi = self.r, self.s, self.t, self.xi
        m11 = r(n) * _zI_minus(xi(n)) + s(n)
        m12 = MatPoly.constant((r(n).matmul(self.eta(n)) - t(n)).matmul(Cinv))
        m21 = MatPoly.constant(-C.matmul(r(n - 1) - self._eta_inv_term(t(n - 1), n - 1)))
        inner = s(n - 1) + self._eta_inv_term(t(n - 1), n - 1) * _zI_minus(xi(n - 1))
        m22 = C * inner * Cinv
        return BlockMatrix([[m11, m12], [m21, m22]])

    def Cinv_closed(self, n: int) -> MatrixGR:
        """Displayed norm formula; equals ``C_n^{-1}`` only up to an ``n``-independent scalar."""
        from math import factorial, prod

        a, b, c = self.a, self.b, self.c
        b2n = b ** (2 * n)
        d11 = (prod((a - j + 2 * n for j in range(2 * n + 1)), start=Fraction(1))
               * prod((a + j + n for j in range(n + 2)), start=Fraction(1)))
        e11 = (a * (a + 1) * factorial(n) * (a + n) * b2n - c * c * factorial(n + 1) * b2n * b * b) / d11
        d22 = (prod((a - j + 2 * n for j in range(2, 2 * n - 1)), start=Fraction(1))
               * prod((a + j + n for j in range(n)), start=Fraction(1)))
        e22 = factorial(n) * b2n * (a * (a + 1) * (a + n - 1) - b * b * c * c * n) / d22
        ai = mat_inverse(self.an(n))
        mid = _m([[e11, 0], [0, e22]]).scale((-1) ** n)
        return ai.matmul(mid).matmul(ai.transpose())


class SemiclassicalExample(_Base):
    """Weight ``[[1 + c^2 z^2, c z], [c z, 1]] z^a exp(-b/z)``.

    ``W = W_L W_L^T`` with ``W_L = [[1, c z], [0, 1]] z^(a/2) exp(-b/(2z))``,
    ``z^2 W_L' = (h2 z^2 + h1 z + h0) W_L``, ``h2 = [[0, c], [0, 0]]``,
    ``h1 = (a/2) I``, ``h0 = (b/2) I``; the right data are the transposes.
    """

    def h2(self) -> MatrixGR:
        return _m([[0, self.c], [0, 0]])

    def hL(self) -> tuple[MatrixGR, MatrixGR, MatrixGR]:
        return (_I2.scale(self.b / 2), _I2.scale(self.a / 2), self.h2())

    def weight(self, right_transposed: bool = True) -> WeightSpec:
        """WeightSpec; ``right_transposed=False`` copies ``h^L`` to the right side verbatim."""
        c = self.c
        phi = MatPoly.from_entry_coeffs([[[1, 0, c * c], [0, c]], [[0, c], [1]]])
        hl = self.hL()
        hr = tuple(m.transpose() for m in hl) if right_transposed else hl
        return WeightSpec(2, self.a, self.b, phi, PearsonData(hl, hr), name="semiclassical_2x2",
                          params={"a": self.a, "b": self.b, "c": c})

    def an(self, n):
        c = self.c
        return _m([[1, -c * self.beta(n)], [0, 1 + c * c * self.gamma(n)]])

    def bn(self, n):
        c = self.c
        gn = self.gamma(n)
        return _m([[0, -c * gn], [-c * gn, c * c * self.beta(n - 1) * gn]])

    def cn(self, n):
        c = self.c
        return _m([[0, 0], [0, c * c * self.gamma(n - 1) * self.gamma(n)]])

    # structure expansion ---------------------------------------------------------
    def r(self, n):
        h2 = self.h2()
        return (_I2.scale(n + self.a / 2)
                + (_I2.scale(self.beta(n + 1) + self.beta(n)) + self.bt(n)).matmul(h2)
                - h2.matmul(self.bt(n + 2)))

    def s(self, n):
        h2, bt, ct = self.h2(), self.bt(n), self.ct(n)
        be, ga = self.beta, self.gamma
        quad = (_I2.scale(be(n) ** 2 + ga(n + 1) + ga(n)) + bt.scale(be(n - 1) + be(n))).matmul(h2)
        return (bt.scale(self.a / 2 + n - 1) + _I2.scale(self.b / 2 + self.a / 2 * be(n) + self.g(n))
                + quad - h2.matmul(self.ct(n + 2)) - self.r(n).matmul(self.bt(n + 1)))

    def t(self, n):
        h2, bt, ct = self.h2(), self.bt(n), self.ct(n)
        be, ga = self.beta, self.gamma
        quad = (_I2.scale((be(n - 1) + be(n)) * ga(n))
                + bt.scale(be(n - 1) ** 2 + ga(n - 1) + ga(n))).matmul(h2)
        return ((_I2.scale(ga(n)) + bt.scale(be(n - 1)) + ct).scale(self.a / 2) + _I2.scale(self.h(n))
                + quad + bt.scale(self.g(n - 1) + self.b / 2) + ct.scale(n - 2)
                - self.r(n).matmul(self.ct(n + 1)) - self.s(n).matmul(bt))

    def u(self, n):
        h2, bt, ct = self.h2(), self.bt(n), self.ct(n)
        be, ga = self.beta, self.gamma
        quad = (bt.scale((be(n - 2) + be(n - 1)) * ga(n - 1)) + _I2.scale(ga(n) * ga(n - 1))).matmul(h2)
        return (quad + (ct.scale(be(n - 2)) + bt.scale(ga(n - 1))).scale(self.a / 2)
                + ct.scale(self.g(n - 2)) + bt.scale(self.h(n - 1)) + ct.scale(self.b / 2)
                - self.s(n).matmul(ct) - self.t(n).matmul(self.bt(n - 1)))

    def structure_expansion_residual(self, n: int) -> MatPoly:
        """``z^2 P_n' + P_n h(z) - h2 P_{n+2} - r_n P_{n+1} - s_n P_n - t_n P_{n-1} - u_n P_{n-2}``."""
        h = MatPoly(list(self.hL()), (2, 2))
        P = self.P
        return (P(n).derivative().mul_z(2) + P(n) * h - self.h2() * P(n + 2) - self.r(n) * P(n + 1)
                - self.s(n) * P(n) - self.t(n) * P(n - 1) - self.u(n) * P(n - 2))

    def Mtilde(self, n: int, C: MatrixGR, Cinv: MatrixGR) -> BlockMatrix:
        """Structure matrix from ``h2, r, s, t, u``; ``C = C_{n-1}``, ``n >= 1``."""
        h2 = self.h2()
        r, s, t, u, xi, eta = self.r, self.s, self.t, self.u, self.xi, self.eta
        zx = _zI_minus
        m11 = (h2 * (zx(xi(n + 1)) * zx(xi(n)) - eta(n + 1)) + r(n) * zx(xi(n)) + s(n)
               - self._eta_inv_term(u(n), n - 1))
        m12 = (h2 * zx(xi(n + 1)) * eta(n) + r(n).matmul(eta(n)) - t(n)
               - self._eta_inv_term(u(n), n - 1) * zx(xi(n - 1))) * Cinv
        ue = self._eta_inv_term(u(n - 1), n - 2)
        te = self._eta_inv_term(t(n - 1), n - 1)
        ueta = ue * zx(xi(n - 2)) * (mat_inverse(eta(n - 1)) if not ue.is_zero() else _O2)
        m21 = -C * (h2 * zx(xi(n)) + r(n - 1) - te - ueta)
        inner = (-h2.matmul(eta(n)) + s(n - 1) + te * zx(xi(n - 1)) - ue
                 + ueta * zx(xi(n - 1)))
        m22 = C * inner * Cinv
        return BlockMatrix([[m11, m12], [m21, m22]])

    def Cinv_closed(self, n: int) -> MatrixGR:
        prod_g = as_gr(1)
        for j in range(1, n + 1):
            prod_g = prod_g * self.gamma(j)
        c2 = self.c * self.c
        mid = MatrixGR.diag([1 + c2 * self.gamma(n + 1), 1 + c2 * self.gamma(n)]).scale(prod_g)
        ai = mat_inverse(self.an(n))
        return ai.matmul(mid).matmul(ai.transpose())


@dataclass
class TriangularExample:
    """One-sided weight ``[[1, c z], [0, 1]] z^(a/2) exp(-b/(2z))`` with ``W_R = I``."""

    a: Fraction
    b: GaussianRational
    c: GaussianRational

    def __post_init__(self):
        self.a = as_rational(self.a)
        self.b = as_gr(self.b)
        self.c = as_gr(self.c)

    def weight(self) -> WeightSpec:
        phi = MatPoly.from_entry_coeffs([[[1], [0, self.c]], [[0], [1]]])
        hl = (_I2.scale(self.b / 2), _I2.scale(self.a / 2), _m([[0, self.c], [0, 0]]))
        return WeightSpec(2, self.a / 2, self.b / 2, phi, PearsonData(hl, (_O2, _O2, _O2)),
                          name="triangular_2x2", params={"a": self.a, "b": self.b, "c": self.c})
