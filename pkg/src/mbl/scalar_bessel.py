"""Scalar generalized Bessel polynomials and their closed-form coefficient tables.

Conventions.  ``y_n(x, a, b) = 2F0(-n, a+n-1; ; -x/b)`` is orthogonal for the
weight ``z^(a-2) exp(-b/z)``.  The monic family ``B_n`` used by the matrix
examples is built from ``y_n(x, a+2, b)`` and is therefore orthogonal for
``z^a exp(-b/z)``; its recurrence and structure coefficients are

    beta_n  = -a b / ((a+2n)(a+2n+2))
    gamma_n = -b^2 n (a+n) / ((a+2n-1)(a+2n)^2(a+2n+1))
    g_n     = -2 b n (a+n+1) / ((a+2n)(a+2n+2))
    h_n     =  b^2 n (a+n)(a+n+1) / ((a+2n-1)(a+2n)^2(a+2n+1))
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import ParameterDegenerate, TruncationTooShort
from .exactnum import ONE, ZERO, GaussianRational, as_gr, as_rational, pochhammer
from .polymat import LaurentTail, MatPoly
from .report import ResidualReport

__all__ = [
    "ScalarBesselParams",
    "ScalarCoeffTable",
    "gbp_coeffs",
    "monic_bessel",
    "monic_bessel_poly",
    "scalar_coeff_table",
    "expand_in_monic_basis",
    "check_scalar_recurrence",
    "check_scalar_structure",
    "scalar_ode_residual_P",
    "scalar_ode_residual_Q",
    "loop_norm_ratio",
]


@dataclass(frozen=True)
class ScalarBesselParams:
    a: Fraction
    b: GaussianRational

    def __post_init__(self):
        object.__setattr__(self, "a", as_rational(self.a))
        object.__setattr__(self, "b", as_gr(self.b))
        if self.b.re <= 0:
            raise ParameterDegenerate("b must have positive real part")


def _params(a, b) -> ScalarBesselParams:
    if isinstance(a, ScalarBesselParams):
        return a
    return ScalarBesselParams(a, b)


def _nonzero(d, what: str):
    if d == 0:
        raise ParameterDegenerate(f"vanishing denominator in {what}")
    return d


def gbp_coeffs(n: int, a, b) -> list[GaussianRational]:
    """Low-to-high coefficients of ``y_n(x, a, b)``."""
    a = as_rational(a)
    b = as_gr(b)
    if not b:
        raise ParameterDegenerate("b = 0")
    out = []
    minus_inv_b = -ONE / b
    for k in range(n + 1):
        c = pochhammer(Fraction(-n), k) * pochhammer(a + n - 1, k) / factorial(k)
        out.append(as_gr(c) * minus_inv_b ** k)
    return out


def monic_bessel(n: int, a, b=None) -> list[GaussianRational]:
    """Monic ``B_n``: ``y_n(x, a+2, b)`` divided by its leading coefficient."""
    p = _params(a, b)
    coeffs = gbp_coeffs(n, p.a + 2, p.b)
    lead = coeffs[-1]
    if not lead:
        raise ParameterDegenerate(f"leading coefficient of y_{n}(x, {p.a + 2}, b) vanishes")
    return [c / lead for c in coeffs]


def monic_bessel_poly(n: int, a, b=None) -> MatPoly:
    if n < 0:
        return MatPoly.zero(1)
    return MatPoly.from_scalar_coeffs(monic_bessel(n, a, b))


@dataclass(frozen=True)
class ScalarCoeffTable:
    beta: tuple[GaussianRational, ...]
    gamma: tuple[GaussianRational, ...]
    g: tuple[GaussianRational, ...]
    h: tuple[GaussianRational, ...]

    def replace(self, **changes) -> "ScalarCoeffTable":
        """Copy with entries overridden, e.g. ``replace(beta={0: x})``."""
        fields = {}
        for name in ("beta", "gamma", "g", "h"):
            vals = list(getattr(self, name))
            for k, v in changes.get(name, {}).items():
                vals[k] = as_gr(v)
            fields[name] = tuple(vals)
        return ScalarCoeffTable(**fields)


def scalar_coeff_table(n_max: int, a, b=None) -> ScalarCoeffTable:
    """Closed-form ``beta_n, gamma_n, g_n, h_n`` for ``0 <= n <= n_max``."""
    p = _params(a, b)
    a, b = p.a, p.b
    beta, gamma, g, h = [], [], [], []
    for n in range(n_max + 1):
        d0 = _nonzero((a + 2 * n) * (a + 2 * n + 2), f"beta_{n}/g_{n}")
        beta.append(-a * b / d0)
        g.append(-2 * b * (n * (a + n + 1)) / d0)
        if n == 0:
            # numerators vanish identically at n = 0
            gamma.append(ZERO)
            h.append(ZERO)
            continue
        d1 = _nonzero((a + 2 * n - 1) * (a + 2 * n) ** 2 * (a + 2 * n + 1), f"gamma_{n}/h_{n}")
        gamma.append(-(b * b) * (n * (a + n)) / d1)
        h.append(b * b * (n * (a + n) * (a + n + 1)) / d1)
    return ScalarCoeffTable(tuple(beta), tuple(gamma), tuple(g), tuple(h))


def expand_in_monic_basis(p: list, basis: list[list]) -> list[GaussianRational]:
    """Coefficients ``c_k`` with ``p = sum_k c_k basis[k]`` for a monic basis (``deg basis[k] = k``)."""
    rem = [as_gr(c) for c in p]
    while rem and not rem[-1]:
        rem.pop()
    out = [ZERO] * max(len(rem), 1)
    for k in range(len(rem) - 1, -1, -1):
        c = rem[k]
        out[k] = c
        if c:
            bk = basis[k]
            for j in range(k + 1):
                rem[j] = rem[j] - c * bk[j]
    return out


def _scalar(p: MatPoly) -> list[GaussianRational]:
    return p.scalar_coeffs()


def check_scalar_recurrence(n_max: int, a, b=None, table: ScalarCoeffTable | None = None) -> ResidualReport:
    """``x B_n - B_{n+1} - beta_n B_n - gamma_n B_{n-1}`` for every ``n`` with ``n+1 <= n_max``."""
    p = _params(a, b)
    table = table or scalar_coeff_table(max(n_max, 0), p)
    report = ResidualReport("scalar_recurrence", anchor="x B_n = B_{n+1} + beta_n B_n + gamma_n B_{n-1}")
    B = [monic_bessel_poly(k, p) for k in range(n_max + 1)]
    for n in range(n_max):
        prev = B[n - 1] if n >= 1 else MatPoly.zero(1)
        r = B[n].mul_z(1) - B[n + 1] - B[n] * table.beta[n] - prev * table.gamma[n]
        report.add(n, r)
    return report


def check_scalar_structure(n_max: int, a, b=None, table: ScalarCoeffTable | None = None) -> ResidualReport:
    """``x^2 B_n' - n B_{n+1} - g_n B_n - h_n B_{n-1}`` for every ``n`` with ``n+1 <= n_max``."""
    p = _params(a, b)
    table = table or scalar_coeff_table(max(n_max, 0), p)
    report = ResidualReport("scalar_structure", anchor="x^2 B_n' = n B_{n+1} + g_n B_n + h_n B_{n-1}")
    B = [monic_bessel_poly(k, p) for k in range(n_max + 1)]
    for n in range(n_max):
        prev = B[n - 1] if n >= 1 else MatPoly.zero(1)
        r = B[n].derivative().mul_z(2) - B[n + 1] * n - B[n] * table.g[n] - prev * table.h[n]
        report.add(n, r)
    return report


def _scalar_weight_mops(n: int, a, b=None, extra: int = 0):
    """MOPs data for ``z^(a-2) exp(-b/z)`` through degree ``n`` (imported lazily)."""
    from .mops import solve_mops
    from .weights import WeightSpec, matrix_moment_table

    p = _params(a, b)
    spec = WeightSpec(1, p.a - 2, p.b, MatPoly.scalar_times([1], 1))
    table = matrix_moment_table(spec, 2 * n + 2 + extra)
    return solve_mops(table, n), table


def scalar_ode_residual_P(n: int, a, b=None, P: MatPoly | None = None) -> MatPoly:
    """``z^2 P'' + (a z + b) P' - n (a+n-1) P`` for the monic ``P_n`` of ``z^(a-2) exp(-b/z)``."""
    p = _params(a, b)
    if P is None:
        data, _ = _scalar_weight_mops(n, p)
        P = data.P_L[n]
    lin = MatPoly.from_scalar_coeffs([p.b, p.a])
    return P.derivative().derivative().mul_z(2) + lin * P.derivative() - P * (n * (p.a + n - 1))


def scalar_ode_residual_Q(n: int, a, b=None, K: int = 8, *, a_ode=None,
                          Q: LaurentTail | None = None) -> LaurentTail:
    """``z^2 Q'' + ((4-a) z - b) Q' - (n+1)(n+a-2) Q`` on the exact Laurent tail of ``Q_n``.

    ``Q_n`` is expanded through ``z^-(n+K+3)``.  ``a_ode`` replaces ``a`` in
    the differential operator only (sensitivity control).
    """
    if K < 1:
        raise TruncationTooShort("truncation order K must be >= 1")
    p = _params(a, b)
    if Q is None:
        from .mops import second_kind_series

        data, table = _scalar_weight_mops(n, p, extra=K + 4 + 2 * n)
        series = second_kind_series(data, table, n + K + 2)
        Q = series.QL[n]
    need = -(n + K + 3)
    if Q.known_from is not None and Q.known_from > need:
        raise TruncationTooShort(f"Q_{n} known only from z^{Q.known_from}, need z^{need}")
    a_op = p.a if a_ode is None else as_rational(a_ode)
    lin = MatPoly.from_scalar_coeffs([-p.b, 4 - a_op])
    return (Q.derivative().derivative().mul_z(2) + lin * Q.derivative()
            - Q * ((n + 1) * (n + a_op - 2)))


def loop_norm_ratio(n: int, a, b=None) -> GaussianRational:
    """``<P_n, P_n> / <1, 1>`` for monic ``P_n`` of ``z^(a-2) exp(-b/z)`` from the loop norm.

    The loop norm of ``y_n(., a, b)`` is proportional to
    ``(-1)^n n! Gamma(a) / ((a+2n-1) Gamma(a+n-1))`` with an ``n``-free constant;
    dividing by the squared leading coefficient ``((a+n-1)_n / b^n)^2`` gives
    the monic norm ratio.
    """
    p = _params(a, b)
    a, b = p.a, p.b
    if n == 0:
        return ONE
    gamma_ratio = pochhammer(a, n - 1)  # Gamma(a+n-1)/Gamma(a)
    denom = _nonzero((a + 2 * n - 1) * gamma_ratio, f"loop norm of degree {n}")
    lead = as_gr(pochhammer(a + n - 1, n)) / b ** n
    if not lead:
        raise ParameterDegenerate(f"y_{n}(x, {a}, b) has vanishing leading coefficient")
    return as_gr(Fraction((-1) ** n * factorial(n)) / denom) / (lead * lead)
