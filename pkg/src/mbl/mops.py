"""Monic left/right matrix biorthogonal polynomials from a moment table.

``P_n^L`` solves ``<P_n^L, z^k> = 0`` for ``k < n``, a block-Hankel system in
the moments; ``C_n^{-1} = <P_n^L, z^n>``.  Recurrence coefficients are read
off by matching the two highest sub-leading coefficients of the three-term
relation; the norm formulas ``eta_n^L = C_n^{-1} C_{n-1}`` etc. are then
checked independently in :func:`recurrence_check`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import RegularityFailure, SingularMatrix, TruncationTooShort
from .polymat import LaurentTail, MatPoly, MatrixGR, bareiss_solve, mat_inverse
from .report import ResidualReport
from .weights import MomentTable, pairing, stieltjes_series

__all__ = [
    "MopsData",
    "SecondKindSeries",
    "solve_mops",
    "block_hankel",
    "biorthogonality_check",
    "recurrence_check",
    "second_kind_series",
    "second_kind_recurrence_check",
    "subleading_sum_check",
    "p2_double_sum",
]


def _sub(p: MatPoly, n: int, k: int) -> MatrixGR:
    """``p^k_n``: coefficient of ``z^(n-k)`` in the degree-``n`` polynomial ``p``."""
    if n - k < 0:
        return MatrixGR.zeros(*p.shape)
    return p.coeff(n - k)


@dataclass(frozen=True)
class MopsData:
    """Per-degree record of the monic biorthogonal families.

    ``P_L``/``P_R`` run through degree ``n_max + 1``; norms and recurrence
    coefficients through ``n_max``.
    """

    N: int
    n_max: int
    P_L: tuple[MatPoly, ...]
    P_R: tuple[MatPoly, ...]
    Cinv: tuple[MatrixGR, ...]
    C: tuple[MatrixGR, ...]
    xiL: tuple[MatrixGR, ...]
    etaL: tuple[MatrixGR, ...]
    xiR: tuple[MatrixGR, ...]
    etaR: tuple[MatrixGR, ...]

    # sub-leading coefficients ------------------------------------------------
    def p1L(self, n: int) -> MatrixGR:
        return _sub(self.P_L[n], n, 1) if n >= 0 else MatrixGR.zeros(self.N)

    def p2L(self, n: int) -> MatrixGR:
        return _sub(self.P_L[n], n, 2) if n >= 0 else MatrixGR.zeros(self.N)

    def p1R(self, n: int) -> MatrixGR:
        return _sub(self.P_R[n], n, 1) if n >= 0 else MatrixGR.zeros(self.N)

    def p2R(self, n: int) -> MatrixGR:
        return _sub(self.P_R[n], n, 2) if n >= 0 else MatrixGR.zeros(self.N)

    def C_conv(self, n: int) -> MatrixGR:
        """``C_n`` with the convention ``C_{-1} := 0``."""
        if n < 0:
            return MatrixGR.zeros(self.N)
        return self.C[n]

    def PL(self, n: int) -> MatPoly:
        return self.P_L[n] if n >= 0 else MatPoly.zero(self.N)

    def PR(self, n: int) -> MatPoly:
        return self.P_R[n] if n >= 0 else MatPoly.zero(self.N)

    def perturbed(self, **changes) -> "MopsData":
        """Copy with selected per-degree entries replaced, e.g. ``perturbed(etaL={2: m})``."""
        kw = {}
        for name, upd in changes.items():
            vals = list(getattr(self, name))
            for k, v in upd.items():
                vals[k] = v
            kw[name] = tuple(vals)
        return replace(self, **kw)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "n_max": self.n_max,
            "P_L": [p.to_json() for p in self.P_L],
            "P_R": [p.to_json() for p in self.P_R],
            "Cinv": [m.to_json() for m in self.Cinv],
            "xiL": [m.to_json() for m in self.xiL],
            "etaL": [m.to_json() for m in self.etaL],
            "xiR": [m.to_json() for m in self.xiR],
            "etaR": [m.to_json() for m in self.etaR],
            "p1L": [self.p1L(n).to_json() for n in range(self.n_max + 1)],
            "p2L": [self.p2L(n).to_json() for n in range(self.n_max + 1)],
            "p1R": [self.p1R(n).to_json() for n in range(self.n_max + 1)],
        }


def block_hankel(table: MomentTable, n: int, shift: int = 0) -> MatrixGR:
    """``[W_{j+k+shift}]_{j,k<n}`` as an ``nN x nN`` matrix."""
    N = table.N
    entries = []
    for j in range(n):
        for r in range(N):
            for k in range(n):
                w = table[j + k + shift]
                entries.extend(w.entries[r * N:(r + 1) * N])
    return MatrixGR(n * N, n * N, entries)


def _stack_rows(blocks: list[MatrixGR]) -> MatrixGR:
    N = blocks[0].n_cols
    entries = []
    for b in blocks:
        entries.extend(b.entries)
    return MatrixGR(len(blocks) * blocks[0].n_rows, N, entries)


def _split_rows(m: MatrixGR, N: int) -> list[MatrixGR]:
    k = m.n_rows // N
    c = m.n_cols
    return [MatrixGR(N, c, m.entries[i * N * c:(i + 1) * N * c]) for i in range(k)]


def _solve_degree(table: MomentTable, n: int) -> tuple[MatPoly, MatPoly]:
    N = table.N
    eye = MatrixGR.identity(N)
    if n == 0:
        return MatPoly.constant(eye), MatPoly.constant(eye)
    H = block_hankel(table, n)
    rhs = _stack_rows([table[n + k] for k in range(n)])
    try:
        # right: H [p_0; ..; p_{n-1}] = -[W_n; ..; W_{2n-1}]
        right = bareiss_solve(H, -rhs)
        # left: [p_0 .. p_{n-1}] H = -[W_n .. W_{2n-1}]  <=>  H^T X^T = -R^T
        rhs_l = _stack_rows([table[n + k].transpose() for k in range(n)])
        left_t = bareiss_solve(H.transpose(), -rhs_l)
    except SingularMatrix:
        raise RegularityFailure(n - 1) from None
    pr = _split_rows(right, N) + [eye]
    pl = [b.transpose() for b in _split_rows(left_t, N)] + [eye]
    return MatPoly(pl, (N, N)), MatPoly(pr, (N, N))


def solve_mops(table: MomentTable, n_max: int) -> MopsData:
    """Monic biorthogonal families through degree ``n_max + 1`` and norms through ``n_max``.

    Needs ``W_0..W_{2 n_max + 1}``.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if len(table) < 2 * n_max + 2:
        raise ValueError(f"solve_mops(n_max={n_max}) needs {2 * n_max + 2} moments, got {len(table)}")
    N = table.N
    PL, PR, Cinv, C = [], [], [], []
    for n in range(n_max + 2):
        pl, pr = _solve_degree(table, n)
        PL.append(pl)
        PR.append(pr)
        if n <= n_max:
            cinv = pairing(pl, table, MatPoly.monomial(MatrixGR.identity(N), n))
            try:
                c = mat_inverse(cinv)
            except SingularMatrix:
                raise RegularityFailure(n) from None
            Cinv.append(cinv)
            C.append(c)
    xiL, etaL, xiR, etaR = [], [], [], []
    for n in range(n_max + 1):
        p1n, p1n1 = _sub(PL[n], n, 1), _sub(PL[n + 1], n + 1, 1)
        p2n, p2n1 = _sub(PL[n], n, 2), _sub(PL[n + 1], n + 1, 2)
        xi = p1n - p1n1
        xiL.append(xi)
        etaL.append(p2n - p2n1 - xi.matmul(p1n))
        r1n, r1n1 = _sub(PR[n], n, 1), _sub(PR[n + 1], n + 1, 1)
        r2n, r2n1 = _sub(PR[n], n, 2), _sub(PR[n + 1], n + 1, 2)
        xr = r1n - r1n1
        xiR.append(xr)
        etaR.append(r2n - r2n1 - r1n.matmul(xr))
    return MopsData(N, n_max, tuple(PL), tuple(PR), tuple(Cinv), tuple(C),
                    tuple(xiL), tuple(etaL), tuple(xiR), tuple(etaR))


def biorthogonality_check(data: MopsData, table: MomentTable) -> ResidualReport:
    """``<P_n^L, P_m^R> - delta_{nm} C_n^{-1}`` for all ``n, m <= n_max``."""
    report = ResidualReport("biorthogonality", anchor="<P_n^L, P_m^R>_W = delta_nm C_n^{-1}")
    for n in range(data.n_max + 1):
        worst = None
        for m in range(data.n_max + 1):
            g = pairing(data.P_L[n], table, data.P_R[m])
            if n == m:
                g = g - data.Cinv[n]
            if not g.is_zero() and worst is None:
                worst = (m, g)
        if worst is None:
            report.add(n, None)
        else:
            report.add(n, worst[1], note=f"fails against m={worst[0]}")
    return report


def recurrence_check(data: MopsData) -> ResidualReport:
    """Three-term recurrences for both families plus the norm formulas for eta and xi^R."""
    report = ResidualReport("recurrence", anchor="z P_n = P_{n+1} + xi_n P_n + eta_n P_{n-1}")
    N = data.N
    for n in range(data.n_max + 1):
        left = (data.P_L[n].mul_z(1) - data.P_L[n + 1] - data.xiL[n] * data.P_L[n]
                - data.etaL[n] * data.PL(n - 1))
        right = (data.P_R[n].mul_z(1) - data.P_R[n + 1] - data.P_R[n] * data.xiR[n]
                 - data.PR(n - 1) * data.etaR[n])
        parts = [left, right]
        parts.append(data.xiR[n] - data.C[n].matmul(data.xiL[n]).matmul(data.Cinv[n]))
        if n >= 1:
            parts.append(data.etaL[n] - data.Cinv[n].matmul(data.C[n - 1]))
            parts.append(data.etaR[n] - data.C[n - 1].matmul(data.Cinv[n]))
        else:
            parts.append(data.etaL[0])
            parts.append(data.etaR[0])
        report.add(n, [p for p in parts])
    return report


def p2_double_sum(data: MopsData, n: int, reading: str) -> MatrixGR:
    """``p^2_{L,n}`` from the recurrence coefficients.

    ``reading="ordered"``: ``sum_{0<=j<i<n} xi_i xi_j - sum_{k<n} eta_k``.
    ``reading="full"``: ``sum_{i,j<n} xi_i xi_j - sum_{k<n} eta_k`` (literal double sum).
    """
    acc = MatrixGR.zeros(data.N)
    for i in range(n):
        for j in range(n):
            if reading == "full" or j < i:
                acc = acc + data.xiL[i].matmul(data.xiL[j])
    for k in range(n):
        acc = acc - data.etaL[k]
    return acc


def subleading_sum_check(data: MopsData) -> ResidualReport:
    """``p^1_n = -sum_{k<n} xi_k`` and the ordered-pair reading of ``p^2_n`` versus coefficients.

    Notes record whether the literal full double sum also matches.
    """
    report = ResidualReport("subleading_sums", anchor="p^1_n = -sum xi_k, p^2_n = sum xi_i xi_j - sum eta_k")
    full_ok = True
    for n in range(data.n_max + 1):
        s1 = MatrixGR.zeros(data.N)
        for k in range(n):
            s1 = s1 - data.xiL[k]
        r1 = data.p1L(n) - s1
        r2 = data.p2L(n) - p2_double_sum(data, n, "ordered")
        if not (data.p2L(n) - p2_double_sum(data, n, "full")).is_zero():
            full_ok = False
        report.add(n, [r1, r2])
    report.notes.append(
        "full double-sum reading of p^2 " + ("also matches" if full_ok else "does NOT match")
        + "; ordered pairs (later index on the left) is the reading that holds"
    )
    return report


# -- second kind functions -------------------------------------------------------

@dataclass(frozen=True)
class SecondKindSeries:
    """Laurent tails of ``Q_n^L``, ``Q_n^R``; ``QL[n]`` is known through ``z^-(n+K+1)``."""

    K: int
    QL: tuple[LaurentTail, ...]
    QR: tuple[LaurentTail, ...]
    q1L: tuple[MatrixGR, ...] = field(default=())
    q1R: tuple[MatrixGR, ...] = field(default=())

    def to_json(self) -> dict:
        return {"K": self.K, "QL": [q.to_json() for q in self.QL], "QR": [q.to_json() for q in self.QR]}


def second_kind_series(data: MopsData, table: MomentTable, K: int) -> SecondKindSeries:
    """``Q_n^L(z) = -sum_k z^{-k-1} <P_n^L, z^k>`` and the right analogue.

    Computed for every available degree whose moments fit: ``Q_n`` needs
    ``W_0..W_{2n+K}``.  Raises TruncationTooShort if even ``Q_{n_max}`` does not fit.
    """
    if K < 0:
        raise TruncationTooShort("K must be >= 0")
    N = data.N
    QL, QR, q1L, q1R = [], [], [], []
    for n, (pl, pr) in enumerate(zip(data.P_L, data.P_R)):
        top = n + K
        if top + n >= len(table):
            if n <= data.n_max:
                raise TruncationTooShort(
                    f"Q_{n} through z^-{top + 1} needs W_{top + n}; table has {len(table)} moments"
                )
            break
        tl, tr = {}, {}
        for k in range(top + 1):
            accl = MatrixGR.zeros(N)
            accr = MatrixGR.zeros(N)
            for j in range(n + 1):
                w = table[j + k]
                accl = accl + pl.coeff(j).matmul(w)
                accr = accr + w.matmul(pr.coeff(j))
            tl[-k - 1] = -accl
            tr[-k - 1] = -accr
        ql = LaurentTail(tl, (N, N), -top - 1)
        qr = LaurentTail(tr, (N, N), -top - 1)
        QL.append(ql)
        QR.append(qr)
        if n <= data.n_max and K >= 1:
            q1L.append(-data.C[n].matmul(ql.coeff(-n - 2)))
            q1R.append(-qr.coeff(-n - 2).matmul(data.C[n]))
    return SecondKindSeries(K, tuple(QL), tuple(QR), tuple(q1L), tuple(q1R))


def second_kind_recurrence_check(series: SecondKindSeries, data: MopsData,
                                 include_n0: bool = True) -> ResidualReport:
    """``z Q_n - Q_{n+1} - xi_n Q_n - eta_n Q_{n-1}`` order by order (left and right).

    ``n = 0`` involves ``Q_{-1} = -C_{-1}^{-1}``; there ``eta_0 Q_{-1}`` is
    replaced by ``-C_0^{-1}`` (the value for any invertible ``C_{-1}``) and
    the entry is filed under the convention section.
    """
    report = ResidualReport("second_kind_recurrence",
                            anchor="z Q_n = Q_{n+1} + xi_n Q_n + eta_n Q_{n-1}")
    top = min(data.n_max, len(series.QL) - 2)
    if top < 0:
        raise TruncationTooShort("need Q_{n+1} for at least one n")
    for n in range(0, top + 1):
        zq = series.QL[n].mul_z(1)
        zr = series.QR[n].mul_z(1)
        if n == 0:
            tail_l = LaurentTail.from_matrix(-data.Cinv[0])
            tail_r = LaurentTail.from_matrix(-data.Cinv[0])
        else:
            tail_l = data.etaL[n] * series.QL[n - 1]
            tail_r = series.QR[n - 1] * data.etaR[n]
        left = zq - series.QL[n + 1] - data.xiL[n] * series.QL[n] - tail_l
        right = zr - series.QR[n + 1] - series.QR[n] * data.xiR[n] - tail_r
        if n == 0:
            if include_n0:
                report.add(0, [left, right], section="convention",
                           note="excluded by C_{-1} convention; eta_0 Q_{-1} taken as -C_0^{-1}")
        else:
            report.add(n, [left, right])
    return report
