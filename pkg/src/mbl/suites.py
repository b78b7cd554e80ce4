"""Registry of identity suites run by ``mbl verify``.

Each suite names the identity it checks, carries a short anchor, and decides
for itself whether the loaded weight meets its hypotheses.  Inapplicable
suites produce a report marked ``skipped: hypothesis not met`` rather than
failing.
"""

from __future__ import annotations

import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .closed_forms import ClassicalExample, SemiclassicalExample
from .errors import MblError
from .mops import (MopsData, SecondKindSeries, biorthogonality_check, recurrence_check,
                   second_kind_recurrence_check, second_kind_series, solve_mops, subleading_sum_check)
from .painleve import commutative_reduction, dpiv_report, dpiv_state, example_block_relations
from .report import ResidualReport
from .scalar_bessel import (check_scalar_recurrence, check_scalar_structure, loop_norm_ratio,
                            scalar_coeff_table, scalar_ode_residual_P, scalar_ode_residual_Q)
from . import structure as st
from .weights import MomentTable, WeightSpec, matrix_moment_table, pearson_moment_residual

log = logging.getLogger(__name__)

__all__ = ["VerifyContext", "Suite", "SUITES", "suite_names", "run_suites", "thread_cap"]


@dataclass
class VerifyContext:
    """Shared, lazily computed inputs.  Everything stored here is immutable once built."""

    spec: WeightSpec
    n_max: int
    K: int
    include_n0: bool = False
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def _get(self, key, build):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    @staticmethod
    def moments_needed(n_max: int, K: int) -> int:
        """Number of moments ``W_0, W_1, ...`` the suites read."""
        return 2 * n_max + K + 7

    @property
    def table(self) -> MomentTable:
        # Q_{n_max+1} through z^-(n_max+K+4) needs W_{2 n_max + K + 4}; two spare orders
        return self._get("table", lambda: matrix_moment_table(
            self.spec, self.moments_needed(self.n_max, self.K) - 1))

    @property
    def data(self) -> MopsData:
        return self._get("data", lambda: solve_mops(self.table, self.n_max))

    @property
    def series(self) -> SecondKindSeries:
        # two extra orders: the series column differentiates Q_{n-1}
        return self._get("series", lambda: second_kind_series(self.data, self.table, self.K + 2))

    def structure(self, n: int) -> st.StructureMat:
        return self._get(("M", n), lambda: st.structure_general(self.data, self.spec.pearson, n))

    def prepare(self) -> None:
        """Build the shared objects up front so the suites only read them."""
        self.series
        if self.spec.pearson is not None:
            for n in range(self.n_max + 1):
                self.structure(n)


@dataclass(frozen=True)
class Suite:
    name: str
    anchor: str
    applies: Callable[[VerifyContext], str | None]  # None if applicable, else the unmet hypothesis
    run: Callable[[VerifyContext], list[ResidualReport]]


def _needs_pearson(ctx: VerifyContext) -> str | None:
    return None if ctx.spec.pearson is not None else "no Pearson data declared"


def _needs_one_sided(ctx: VerifyContext) -> str | None:
    if ctx.spec.pearson is None:
        return "no Pearson data declared"
    return None if ctx.spec.pearson.one_sided else "weight is not one-sided (right Pearson data nonzero)"


def _scalar_base(ctx: VerifyContext) -> str | None:
    if ctx.spec.N != 1 or ctx.spec.phi.degree != 0:
        return "not a scalar z^alpha exp(-beta/z) weight"
    return None


def _example(ctx: VerifyContext):
    p = ctx.spec.params
    cls = {"classical_2x2": ClassicalExample, "semiclassical_2x2": SemiclassicalExample}.get(ctx.spec.name)
    if cls is None or not {"a", "b", "c"} <= set(p):
        return None
    ex = cls(p["a"].re, p["b"], p["c"], n_max=ctx.n_max + 2)
    w = ex.weight()
    if w.phi != ctx.spec.phi or w.alpha != ctx.spec.alpha or w.beta != ctx.spec.beta:
        return None
    return ex


def _is_example(ctx: VerifyContext) -> str | None:
    return None if _example(ctx) is not None else "spec is not one of the 2x2 closed-form examples"


# -- runners ---------------------------------------------------------------------------

def _block_diff(A, B):
    return (A.map(st._poly) - B.map(st._poly)).assemble()


def _run_pearson(ctx):
    r = pearson_moment_residual(ctx.spec, ctx.table)
    r.anchor = "(n+2) W_{n+1} + sum_k hL_k W_{n+k} + W_{n+k} hR_k = 0"
    return [r]


def _run_biorth(ctx):
    return [biorthogonality_check(ctx.data, ctx.table)]


def _run_recurrence(ctx):
    return [recurrence_check(ctx.data), subleading_sum_check(ctx.data)]


def _run_second_kind(ctx):
    return [second_kind_recurrence_check(ctx.series, ctx.data, include_n0=ctx.include_n0)]


def _run_structure(ctx):
    pearson = ctx.spec.pearson
    same = ResidualReport("structure_formula_vs_definition",
                          anchor="M~_n from entry formulas equals (z^2 Y_n' + Y_n D) Y_n^{-1}")
    poly = ResidualReport("structure_polynomial",
                          anchor="(z^2 Y_n' + Y_n D) Y_n^{-1} has no negative powers; degree <= 1 or 2")
    bound = 1 if pearson.classical else 2
    for n in range(ctx.n_max):
        Md, bad = st.structure_from_definition(ctx.data, ctx.series, pearson, n)
        Mg = ctx.structure(n)
        section = "convention" if n == 0 else "main"
        if n == 0 and not ctx.include_n0:
            section = None
        if section:
            note = "uses C_{-1} := 0" if n == 0 else ""
            same.add(n, _block_diff(Md.ML, Mg.ML), section=section, note=note)
        deg = st.degree_of(Md.ML)
        poly.add_flag(n, not bad and deg <= bound,
                      note="" if not bad else f"negative exponents {bad}; degree {deg}")
    return [same, poly]


def _run_zero_curvature(ctx):
    left = ResidualReport("zero_curvature_left", anchor="z^2 T_n' = M~_{n+1} T_n - T_n M~_n")
    right = ResidualReport("zero_curvature_right", anchor="z^2 (T^R_n)' = T^R_n M~^R_{n+1} - M~^R_n T^R_n")
    for n in range(0 if ctx.include_n0 else 1, ctx.n_max):
        M0, M1 = ctx.structure(n), ctx.structure(n + 1)
        T = st.build_transfer(ctx.data, n)
        section = "convention" if n == 0 else "main"
        left.add(n, st.zero_curvature_residual(M0.ML, M1.ML, T.TL), section=section)
        right.add(n, st.zero_curvature_right_residual(M0.MR, M1.MR, T.TR), section=section)
    return [left, right]


def _run_ode1(ctx):
    pearson = ctx.spec.pearson
    poly = ResidualReport("ode1_polynomial_column", anchor="z^2 Y' + Y D = M~_n Y, first column")
    ser = ResidualReport("ode1_series_column",
                         anchor=f"z^2 Y' + Y D = M~_n Y, second column through z^-(n+{ctx.K})")
    row = ResidualReport("ode1_right_row", anchor="z^2 X' + h^R X = X M~^R_n, right polynomial row")
    for n in range(0 if ctx.include_n0 else 1, ctx.n_max + 1):
        M = ctx.structure(n)
        section = "convention" if n == 0 else "main"
        poly.add(n, st.ode1_residual_polycolumn(ctx.data, M.ML, pearson, n), section=section)
        row.add(n, st.ode1_right_residual_polyrow(ctx.data, M.MR, pearson, n), section=section)
        if n >= 1:
            ser.add(n, st.ode1_residual_seriescolumn(ctx.data, ctx.series, M.ML, pearson, n, ctx.K))
    return [poly, ser, row]


def _run_ode2(ctx):
    r = ResidualReport("ode2", anchor="second-order system through the Miura-like map, times z^2")
    for n in range(1, ctx.n_max + 1):
        r.add(n, st.ode2_residual(ctx.data, ctx.structure(n).ML, ctx.spec.pearson, n))
    return [r]


def _run_scalar(ctx):
    spec, data = ctx.spec, ctx.data
    # tables are indexed by the weight exponent alpha, the ODEs by a = alpha + 2
    a, b = spec.a_base, spec.beta
    table = scalar_coeff_table(ctx.n_max + 1, spec.alpha, b)
    coeffs = ResidualReport("scalar_closed_forms",
                            anchor="xi_n = beta_n, eta_n = gamma_n from the generalized Bessel tables")
    norms = ResidualReport("scalar_norm_ratio", anchor="<P_n,P_n>/<P_0,P_0> equals the loop-norm ratio")
    for n in range(ctx.n_max + 1):
        coeffs.add(n, [data.xiL[n][0, 0] - table.beta[n], data.etaL[n][0, 0] - table.gamma[n]])
        norms.add(n, data.Cinv[n][0, 0] / data.Cinv[0][0, 0] - loop_norm_ratio(n, a, b))
    ode_p = ResidualReport("scalar_ode_P", anchor="z^2 P'' + (a z + b) P' - n(a+n-1) P = 0")
    for n in range(ctx.n_max + 1):
        ode_p.add(n, scalar_ode_residual_P(n, a, b, P=data.P_L[n]))
    ode_q = ResidualReport("scalar_ode_Q",
                           anchor="z^2 Q'' + ((4-a) z - b) Q' - (n+1)(n+a-2) Q = 0 on the Laurent tail")
    for n in range(min(ctx.n_max, 4) + 1):
        ode_q.add(n, scalar_ode_residual_Q(n, a, b, K=ctx.K, Q=ctx.series.QL[n]))
    out = [coeffs, norms, check_scalar_recurrence(ctx.n_max, spec.alpha, b, table),
           check_scalar_structure(ctx.n_max, spec.alpha, b, table), ode_p, ode_q]
    if spec.pearson is not None and spec.pearson.classical:
        elim = ResidualReport("scalar_elimination",
                              anchor="eliminating P_{n-1} from the first-order rows gives the scalar ODE")
        for n in range(1, ctx.n_max + 1):
            elim.add(n, st.scalar_elimination_residual(ctx.structure(n).ML, spec.pearson, n, a))
        out.append(elim)
    return out


def _run_dpiv(ctx):
    state = dpiv_state(ctx.data)
    lo = 0 if ctx.include_n0 else 1
    return [dpiv_report(state, ctx.spec.pearson, lo, ctx.n_max - 1)]


def _run_commutative(ctx):
    state = dpiv_state(ctx.data)
    lo = 0 if ctx.include_n0 else 1
    return [commutative_reduction(state, ctx.spec.pearson, lo, ctx.n_max - 1)]


def _run_block_relations(ctx):
    M = {n: ctx.structure(n).ML for n in range(ctx.n_max + 1)}
    lo = 1 if ctx.include_n0 else 2
    return [example_block_relations(M, ctx.data, lo, ctx.n_max)]


def _run_example(ctx):
    ex = _example(ctx)
    data = ctx.data
    classical = isinstance(ex, ClassicalExample)
    # below this degree the polynomial column alone does not determine M~_n
    unique_from = 2 if classical else 3
    mops = ResidualReport("example_mops", anchor="P_n = a_n^{-1}(a_n B_n + b_n B_{n-1} + c_n B_{n-2})")
    rec = ResidualReport("example_recurrence",
                         anchor="xi_n = beta_n I + bt_n - bt_{n+1}; eta_n = gamma_n I + beta_{n-1} bt_n + ct_n"
                                " - ct_{n+1} - xi_n bt_n")
    norms = ResidualReport("example_norms", anchor="displayed closed form of C_n^{-1}")
    expn = ResidualReport("example_expansion", anchor="z^2 P_n' + P_n h^L expanded in the MOP basis")
    asm = ResidualReport("example_structure_assembly",
                         anchor="M~_n assembled from the expansion equals the general entry formulas")
    for n in range(ctx.n_max + 1):
        mops.add(n, data.P_L[n] - ex.P(n))
        rec.add(n, [data.xiL[n] - ex.xi(n), data.etaL[n] - ex.eta(n)])
        low = classical and n < 2
        norms.add(n, data.Cinv[n] - ex.Cinv_closed(n), section="finding" if low else "main",
                  note="displayed norm formula is not exact below n = 2" if low else "")
        expn.add(n, ex.structure_expansion_residual(n))
        if n >= 1:
            r = _block_diff(ex.Mtilde(n, data.C[n - 1], data.Cinv[n - 1]), ctx.structure(n).ML)
            if n >= unique_from:
                asm.add(n, r)
            else:
                asm.add(n, r, section="non_unique",
                        note="expansion fixes only the polynomial column at this degree")
    return [mops, rec, norms, expn, asm]


SUITES: dict[str, Suite] = {s.name: s for s in [
    Suite("pearson", "moment form of the matrix Pearson equation", _needs_pearson, _run_pearson),
    Suite("biorthogonality", "<P^L_n, z^k> = delta C_n^{-1}, left and right", lambda c: None, _run_biorth),
    Suite("recurrence", "three-term recurrences and sub-leading sums", lambda c: None, _run_recurrence),
    Suite("second_kind", "recurrence for the second-kind Laurent tails", lambda c: None, _run_second_kind),
    Suite("structure", "structure matrix from definition vs entry formulas", _needs_pearson, _run_structure),
    Suite("zero_curvature", "compatibility of transfer and structure matrices", _needs_pearson,
          _run_zero_curvature),
    Suite("ode1", "first-order differential system", _needs_pearson, _run_ode1),
    Suite("ode2", "second-order differential system", _needs_pearson, _run_ode2),
    Suite("scalar", "scalar generalized Bessel closed forms and ODEs", _scalar_base, _run_scalar),
    Suite("dpiv", "non-Abelian discrete Painleve IV relations", _needs_one_sided, _run_dpiv),
    Suite("commutative", "commutative reduction of the dPIV relations", _needs_one_sided, _run_commutative),
    Suite("block_relations", "M~_n lower blocks in terms of M~_{n-1}", _needs_pearson, _run_block_relations),
    Suite("example", "closed forms of the 2x2 examples", _is_example, _run_example),
]}


def suite_names() -> list[str]:
    return list(SUITES)


def thread_cap() -> int:
    raw = os.environ.get("MBL_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _run_one(suite: Suite, ctx: VerifyContext) -> dict:
    reason = suite.applies(ctx)
    if reason is not None:
        return {"anchor": suite.anchor, "status": "skipped", "skipped": f"hypothesis not met: {reason}",
                "pass": True, "reports": []}
    try:
        reports = suite.run(ctx)
    except MblError as exc:
        log.error("suite %s failed: %s", suite.name, exc)
        return {"anchor": suite.anchor, "status": "error", "error": f"{type(exc).__name__}: {exc}",
                "pass": False, "reports": []}
    ok = all(r.passed for r in reports)
    return {"anchor": suite.anchor, "status": "pass" if ok else "fail", "pass": ok,
            "reports": [r.to_json() for r in reports],
            "summary": [r.summary_line() for r in reports]}


def run_suites(ctx: VerifyContext, names: list[str] | None = None) -> dict[str, dict]:
    """Run the selected suites (all by default) concurrently, capped by ``MBL_THREADS``."""
    names = names or suite_names()
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(SUITES)}")
    ctx.prepare()
    with ThreadPoolExecutor(max_workers=min(thread_cap(), len(names))) as pool:
        futures = {n: pool.submit(_run_one, SUITES[n], ctx) for n in names}
        return {n: f.result() for n, f in futures.items()}
