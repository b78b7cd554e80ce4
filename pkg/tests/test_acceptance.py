"""Acceptance criteria.  Each test prints one ``[PASS]``/``[FAIL]`` line with its timing.

Contexts are built from scratch inside each test so the timings include the
moment, Hankel and Laurent-series work.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from mbl import structure as st
from mbl.closed_forms import ClassicalExample, SemiclassicalExample
from mbl.exactnum import GaussianRational
from mbl.mops import p2_double_sum, solve_mops, subleading_sum_check
from mbl.painleve import commutative_reduction, dpiv_residuals, dpiv_state, example_block_relations
from mbl.polymat import MatPoly
from mbl.scalar_bessel import (check_scalar_recurrence, check_scalar_structure, loop_norm_ratio,
                               scalar_ode_residual_P, scalar_ode_residual_Q)
from mbl.suites import VerifyContext
from mbl.weights import WeightSpec, load_weight_spec, matrix_moment_table

from conftest import SPECS, spec_path

RESULTS: list[str] = []

CLASSICAL = [(Fraction(3), GaussianRational(1), GaussianRational(1)),
             (Fraction(5, 2), GaussianRational(2), GaussianRational(Fraction(1, 3)))]


@contextmanager
def criterion(num: int, title: str, limit: float | None = None):
    t0 = time.perf_counter()
    ok, detail = False, ""
    try:
        yield
        ok = True
    except AssertionError as exc:
        detail = f" ({str(exc).splitlines()[0][:80]})" if str(exc) else ""
        raise
    finally:
        dt = time.perf_counter() - t0
        timed_ok = limit is None or dt < limit
        tag = "PASS" if ok and timed_ok else "FAIL"
        lim = f" < {limit:g}s" if limit else ""
        line = f"[{tag}] criterion {num:2d}: {title} ({dt:.2f}s{lim}){detail}"
        RESULTS.append(line)
        print(line)
    assert timed_ok, f"criterion {num} took {dt:.2f}s, limit {limit}s"


def fresh(name: str, n_max: int = 7, K: int = 8) -> VerifyContext:
    ctx = VerifyContext(load_weight_spec(spec_path(name)), n_max, K)
    ctx.prepare()
    return ctx


def _diff(A, B):
    return (A.map(st._poly) - B.map(st._poly)).assemble()


def test_c01_scalar_norm_ratio():
    with criterion(1, "scalar norm ratio equals the loop-norm ratio, n <= 8", 1.0):
        for a, b in [(Fraction(3), GaussianRational(1)), (Fraction(5, 2), GaussianRational(2)),
                     (Fraction(3), GaussianRational(1, 1))]:
            spec = WeightSpec(1, a - 2, b, MatPoly.from_scalar_coeffs([1]))
            data = solve_mops(matrix_moment_table(spec, 18), 8)
            for n in range(9):
                got = data.Cinv[n][0, 0] / data.Cinv[0][0, 0]
                assert got == loop_norm_ratio(n, a, b), f"(a,b)=({a},{b}) n={n}"


def test_c02_classical_closed_form_mops():
    with criterion(2, "Hankel MOPs equal the closed-form a_n^{-1}(a_n B_n + b_n B_{n-1} + c_n B_{n-2}), n <= 6",
                   10.0):
        for a, b, c in CLASSICAL:
            ex = ClassicalExample(a, b, c, n_max=8)
            data = solve_mops(matrix_moment_table(ex.weight(), 14), 6)
            for n in range(7):
                assert data.P_L[n] == ex.P(n), f"(a,b,c)=({a},{b},{c}) n={n}"


def test_c03_recurrence_closed_forms():
    with criterion(3, "xi_n, eta_n closed forms reproduced exactly, n <= 6"):
        for ex in [ClassicalExample(a, b, c, n_max=8) for a, b, c in CLASSICAL] + \
                  [SemiclassicalExample(3, 1, 1, n_max=8)]:
            data = solve_mops(matrix_moment_table(ex.weight(), 16), 7)
            for n in range(7):
                assert data.xiL[n] == ex.xi(n), f"xi_{n} for {ex}"
                assert data.etaL[n] == ex.eta(n), f"eta_{n} for {ex}"


def test_c04_zero_curvature():
    with criterion(4, "zero curvature on the classical and semiclassical examples, 1 <= n <= 6", 10.0):
        for name in ["classical_a3_b1_c1", "semiclassical_a3_b1_c1"]:
            ctx = fresh(name)
            for n in range(1, 7):
                T = st.build_transfer(ctx.data, n)
                r = st.zero_curvature_residual(ctx.structure(n).ML, ctx.structure(n + 1).ML, T.TL)
                assert r.is_zero(), f"{name} n={n}"


def test_c05_first_order_system():
    with criterion(5, "first-order system: polynomial column, series column through z^-(n+8), 1 <= n <= 6"):
        for name in ["classical_a3_b1_c1", "semiclassical_a3_b1_c1", "scalar_a3_b1"]:
            ctx = fresh(name)
            p = ctx.spec.pearson
            for n in range(1, 7):
                M = ctx.structure(n).ML
                assert st.ode1_residual_polycolumn(ctx.data, M, p, n).is_zero(), f"{name} n={n} poly"
                r = st.ode1_residual_seriescolumn(ctx.data, ctx.series, M, p, n, 8)
                assert r.known_from <= -(n + 8) and r.is_zero(), f"{name} n={n} series"


def test_c06_second_order_and_scalar_odes():
    with criterion(6, "second-order system n <= 4; scalar P ODE n <= 10; Q ODE n <= 4"):
        for name in ["classical_a3_b1_c1", "semiclassical_a3_b1_c1"]:
            ctx = fresh(name, n_max=5)
            for n in range(1, 5):
                assert st.ode2_residual(ctx.data, ctx.structure(n).ML, ctx.spec.pearson, n).is_zero()
        for a, b in [(Fraction(3), GaussianRational(1)), (Fraction(5, 2), GaussianRational(2))]:
            for n in range(11):
                assert scalar_ode_residual_P(n, a, b).is_zero(), f"P ODE n={n}"
            for n in range(5):
                assert scalar_ode_residual_Q(n, a, b, K=8).is_zero(), f"Q ODE n={n}"


def test_c07_dpiv():
    with criterion(7, "dPIV on the triangular weight 1 <= n <= 6; commutative reduction (triangular, scalar)"):
        ctx = fresh("triangular_a3_b1_c1")
        state = dpiv_state(ctx.data)
        for n in range(1, 7):
            for form in ("nonabelian", "corrected"):
                r1, r2 = dpiv_residuals(state, ctx.spec.pearson, n, form=form)
                assert r1.is_zero() and r2.is_zero(), f"{form} n={n}"
        for name in ["triangular_a3_b1_c1", "scalar_a3_b1"]:
            c = ctx if name.startswith("tri") else fresh(name)
            rep = commutative_reduction(dpiv_state(c.data), c.spec.pearson, 1, 6, strict=True)
            assert rep.skipped is None and rep.passed, name


def test_c08_block_relations():
    with criterion(8, "final block relations on the symmetric semiclassical example, 2 <= n <= 5"):
        ctx = fresh("semiclassical_a3_b1_c1", n_max=5)
        M = {n: ctx.structure(n).ML for n in range(6)}
        rep = example_block_relations(M, ctx.data, 2, 5)
        assert len(rep.section("main")) == 4 and rep.passed


def test_c09_oracle_redundancy():
    with criterion(9, "two independent paths agree: beta/gamma/g/h, M~ general vs assembly, p1/p2 sums"):
        for alpha, b in [(Fraction(1), GaussianRational(1)), (Fraction(1, 2), GaussianRational(2)),
                         (Fraction(1), GaussianRational(1, 1))]:
            assert check_scalar_recurrence(7, alpha, b).passed
            assert check_scalar_structure(7, alpha, b).passed
        for name, first in [("classical_a3_b1_c1", 2), ("classical_a5h_b2_c1t", 2),
                            ("semiclassical_a3_b1_c1", 3)]:
            ctx = fresh(name)
            p = ctx.spec.params
            cls = SemiclassicalExample if name.startswith("semi") else ClassicalExample
            ex = cls(p["a"].re, p["b"], p["c"], n_max=9)
            for n in range(1, ctx.n_max + 1):
                oracle, bad = st.structure_from_definition(ctx.data, ctx.series, ctx.spec.pearson, n)
                assert not bad and _diff(oracle.ML, ctx.structure(n).ML).is_zero(), f"{name} n={n}"
                if n >= first:
                    asm = ex.Mtilde(n, ctx.data.C[n - 1], ctx.data.Cinv[n - 1])
                    assert _diff(asm, ctx.structure(n).ML).is_zero(), f"{name} assembly n={n}"
            assert subleading_sum_check(ctx.data).passed
            for n in range(ctx.n_max + 1):
                assert p2_double_sum(ctx.data, n, "ordered") == ctx.data.p2L(n)


def test_c10_full_verify():
    specs = sorted(SPECS.glob("*.wspec"))
    assert specs
    with criterion(10, f"full verify on all {len(specs)} shipped specs, exit 0", 60.0):
        env = dict(os.environ)
        for path in specs:
            out = f"/tmp/mbl_acceptance/{path.stem}"
            r = subprocess.run([sys.executable, "-m", "mbl.cli", "verify", "--weight", str(path),
                                "--nmax", "7", "--trunc", "8", "--out", out],
                               capture_output=True, text=True, env=env)
            assert r.returncode == 0, f"{path.stem}: exit {r.returncode}"
            assert json.load(open(f"{out}/report.json"))["pass"]
