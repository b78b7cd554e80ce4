"""Weight specifications ``Phi(z) z^alpha exp(-beta/z)`` and their exact moment tables.

Moments are normalized so that the scalar base has ``m_0 = 1``; the dropped
global constant is transcendental and cancels from every monic polynomial,
recurrence coefficient and residual identity.  Scalar moments come from the
Pearson equation of the base weight alone (closed-loop integration by parts),
so no quadrature is involved anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ParameterDegenerate, ParseError, PearsonMismatch
from .exactnum import ONE, GaussianRational, as_gr, as_rational, format_scalar, parse_scalar
from .polymat import LaurentTail, MatPoly, MatrixGR
from .report import ResidualReport

__all__ = [
    "PearsonData",
    "WeightSpec",
    "MomentTable",
    "parse_weight_spec",
    "load_weight_spec",
    "format_weight_spec",
    "scalar_moment_table",
    "matrix_moment_table",
    "pearson_polynomial_residual",
    "pearson_moment_residual",
    "stieltjes_series",
    "pairing",
]


@dataclass(frozen=True)
class PearsonData:
    """Quadratic Pearson data ``z^2 W' = hL(z) W + W hR(z)``, ``h = h0 + h1 z + h2 z^2``."""

    hL: tuple[MatrixGR, MatrixGR, MatrixGR]
    hR: tuple[MatrixGR, MatrixGR, MatrixGR]

    @property
    def N(self) -> int:
        return self.hL[0].n_rows

    @property
    def classical(self) -> bool:
        return self.hL[2].is_zero() and self.hR[2].is_zero()

    @property
    def one_sided(self) -> bool:
        """``W = W_L`` with ``W_R = I``: the right Pearson polynomial vanishes."""
        return all(h.is_zero() for h in self.hR)

    def hL_poly(self) -> MatPoly:
        return MatPoly(list(self.hL), self.hL[0].shape)

    def hR_poly(self) -> MatPoly:
        return MatPoly(list(self.hR), self.hR[0].shape)

    def shifted(self, side: str, k: int, delta: MatrixGR) -> "PearsonData":
        """Copy with ``delta`` added to one coefficient (used for sensitivity controls)."""
        if side == "L":
            hl = list(self.hL)
            hl[k] = hl[k] + delta
            return PearsonData(tuple(hl), self.hR)
        hr = list(self.hR)
        hr[k] = hr[k] + delta
        return PearsonData(self.hL, tuple(hr))


@dataclass(frozen=True)
class WeightSpec:
    N: int
    alpha: Fraction
    beta: GaussianRational
    phi: MatPoly
    pearson: PearsonData | None = None
    name: str = ""
    params: dict = field(default_factory=dict, compare=False)

    @property
    def a_base(self) -> Fraction:
        """``alpha + 2``: the ``a`` of the base weight ``z^(a-2) exp(-beta/z)``."""
        return self.alpha + 2


@dataclass(frozen=True)
class MomentTable:
    moments: tuple[MatrixGR, ...]
    note: str = "normalized: scalar base moment m_0 = 1, global transcendental constant dropped"

    def __len__(self):
        return len(self.moments)

    def __getitem__(self, k: int) -> MatrixGR:
        return self.moments[k]

    @property
    def N(self) -> int:
        return self.moments[0].n_rows

    def to_json(self) -> dict:
        return {"note": self.note, "moments": [m.to_json() for m in self.moments]}

    @classmethod
    def from_json(cls, obj: dict) -> "MomentTable":
        return cls(tuple(MatrixGR.from_json(m) for m in obj["moments"]), obj.get("note", cls.note))


# -- parsing -------------------------------------------------------------------

_PHI_RE = re.compile(r"^phi\s*\[\s*(\d+)\s*\]\s*\[\s*(\d+)\s*\]\s*=\s*(.*)$")
_H_RE = re.compile(r"^(h[LR][012])\s*=\s*(.*)$")
_KEY_RE = re.compile(r"^(dim|alpha|beta|name)\s+(.*)$")
_PARAM_RE = re.compile(r"^param\s+(\w+)\s*=?\s*(.*)$")


def _parse_matrix_literal(text: str, lineno: int, col: int) -> list[list[GaussianRational]]:
    s = text.strip()
    if not (s.startswith("[[") and s.endswith("]]")):
        raise ParseError(f"matrix literal must look like [[..],[..]], got {s!r}", lineno, col)
    inner = s[1:-1]
    rows = []
    pos = 0
    for m in re.finditer(r"\[([^\[\]]*)\]", inner):
        gap = inner[pos:m.start()].strip()
        if gap not in ("", ","):
            raise ParseError(f"unexpected {gap!r} in matrix literal", lineno, col + 1 + pos)
        pos = m.end()
        cells = m.group(1).split(",")
        rows.append([
            parse_scalar(c, line=lineno, column=col + 1 + m.start(1)) for c in cells
        ])
    if inner[pos:].strip():
        raise ParseError(f"trailing text {inner[pos:].strip()!r} in matrix literal", lineno, col + 1 + pos)
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("ragged matrix literal", lineno, col)
    return rows


def parse_weight_spec(text: str) -> WeightSpec:
    """Parse the line-oriented weight-spec format.

    Keys: ``dim N``, ``alpha p/q``, ``beta p/q+r/s*i``,
    ``phi[i][j] = c0, c1, ...`` (low-to-high, zero-based indices), and optional
    ``hL0|hL1|hL2|hR0|hR1|hR2 = [[..],[..]]``.  ``#`` starts a comment;
    ``name <text>`` and ``param <key> = <scalar>`` are informational.
    If any Pearson coefficient is present, the Pearson identity is verified
    exactly and :class:`PearsonMismatch` is raised when it fails.
    """
    dim = alpha = beta = None
    name = ""
    params: dict[str, GaussianRational] = {}
    phi_entries: dict[tuple[int, int], tuple[list[GaussianRational], int]] = {}
    h_entries: dict[str, tuple[list[list[GaussianRational]], int]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        if m := _PHI_RE.match(stripped):
            i, j = int(m.group(1)), int(m.group(2))
            col = indent + m.start(3) + 1
            cells = m.group(3).split(",")
            coeffs = []
            offset = 0
            for c in cells:
                if not c.strip():
                    raise ParseError("empty coefficient", lineno, col + offset)
                coeffs.append(parse_scalar(c, line=lineno, column=col + offset))
                offset += len(c) + 1
            phi_entries[(i, j)] = (coeffs, lineno)
        elif m := _H_RE.match(stripped):
            h_entries[m.group(1)] = (_parse_matrix_literal(m.group(2), lineno, indent + m.start(2) + 1), lineno)
        elif m := _PARAM_RE.match(stripped):
            params[m.group(1)] = parse_scalar(m.group(2), line=lineno, column=indent + m.start(2) + 1)
        elif m := _KEY_RE.match(stripped):
            key, val = m.group(1), m.group(2).strip()
            col = indent + m.start(2) + 1
            if key == "dim":
                if not val.isdigit() or int(val) <= 0:
                    raise ParseError(f"dim must be a positive integer, got {val!r}", lineno, col)
                dim = int(val)
            elif key == "alpha":
                g = parse_scalar(val, line=lineno, column=col)
                if g.im:
                    raise ParseError("alpha must be real", lineno, col)
                alpha = g.re
            elif key == "beta":
                beta = parse_scalar(val, line=lineno, column=col)
            else:
                name = val
        else:
            raise ParseError(f"unrecognized line {stripped!r}", lineno, indent + 1)

    if dim is None:
        raise ParseError("missing 'dim'")
    if alpha is None:
        raise ParseError("missing 'alpha'")
    if beta is None:
        raise ParseError("missing 'beta'")
    if beta.re <= 0:
        raise ParseError("beta must have positive real part")

    max_deg = 0
    for (i, j), (coeffs, lineno) in phi_entries.items():
        if i >= dim or j >= dim:
            raise ParseError(f"phi[{i}][{j}] outside a {dim}x{dim} weight", lineno)
        max_deg = max(max_deg, len(coeffs) - 1)
    mats = []
    for k in range(max_deg + 1):
        entries = []
        for i in range(dim):
            for j in range(dim):
                coeffs = phi_entries.get((i, j), ([], 0))[0]
                entries.append(coeffs[k] if k < len(coeffs) else 0)
        mats.append(MatrixGR(dim, dim, entries))
    phi = MatPoly(mats, (dim, dim))
    if phi.is_zero():
        raise ParseError("degenerate weight: phi is identically zero")

    pearson = None
    if h_entries:
        hs = {}
        for key in ("hL0", "hL1", "hL2", "hR0", "hR1", "hR2"):
            if key in h_entries:
                rows, lineno = h_entries[key]
                if len(rows) != dim or len(rows[0]) != dim:
                    raise ParseError(f"{key} must be {dim}x{dim}", lineno)
                hs[key] = MatrixGR.from_rows(rows)
            else:
                hs[key] = MatrixGR.zeros(dim)
        pearson = PearsonData(
            (hs["hL0"], hs["hL1"], hs["hL2"]), (hs["hR0"], hs["hR1"], hs["hR2"])
        )

    spec = WeightSpec(dim, alpha, beta, phi, pearson, name, params)
    if pearson is not None:
        residual = pearson_polynomial_residual(spec)
        if not residual.is_zero():
            raise PearsonMismatch(
                "declared Pearson data does not satisfy z^2 W' = hL W + W hR", residual
            )
    return spec


def load_weight_spec(path: str | Path) -> WeightSpec:
    text = Path(path).read_text(encoding="utf-8")
    spec = parse_weight_spec(text)
    if not spec.name:
        spec = WeightSpec(spec.N, spec.alpha, spec.beta, spec.phi, spec.pearson, Path(path).stem, spec.params)
    return spec


def format_weight_spec(spec: WeightSpec) -> str:
    """Render a spec back into the text format (round-trips through the parser)."""
    lines = []
    if spec.name:
        lines.append(f"name {spec.name}")
    for k, v in spec.params.items():
        lines.append(f"param {k} = {format_scalar(v)}")
    lines += [f"dim {spec.N}", f"alpha {format_scalar(spec.alpha)}", f"beta {format_scalar(spec.beta)}"]
    for i in range(spec.N):
        for j in range(spec.N):
            coeffs = spec.phi.entry(i, j)
            while coeffs and not coeffs[-1]:
                coeffs.pop()
            if coeffs:
                lines.append(f"phi[{i}][{j}] = " + ", ".join(format_scalar(c) for c in coeffs))
    if spec.pearson is not None:
        for side, hs in (("L", spec.pearson.hL), ("R", spec.pearson.hR)):
            for k, h in enumerate(hs):
                if not h.is_zero():
                    body = ",".join("[" + ",".join(format_scalar(e) for e in r) + "]" for r in h.rows())
                    lines.append(f"h{side}{k} = [{body}]")
    return "\n".join(lines) + "\n"


# -- Pearson identity at the polynomial level ------------------------------------

def pearson_polynomial_residual(spec: WeightSpec, pearson: PearsonData | None = None) -> MatPoly:
    """``z^2 Phi' + (alpha z + beta) Phi - hL Phi - Phi hR``.

    With ``W = Phi sigma`` and ``z^2 sigma' = (alpha z + beta) sigma`` this is
    ``(z^2 W' - hL W - W hR) / sigma``, so it vanishes iff the Pearson data fit.
    """
    pearson = pearson or spec.pearson
    if pearson is None:
        raise ValueError("spec carries no Pearson data")
    phi = spec.phi
    n = spec.N
    base = MatPoly.scalar_times([spec.beta, spec.alpha], n)
    return phi.derivative().mul_z(2) + base * phi - pearson.hL_poly() * phi - phi * pearson.hR_poly()


# -- moments ---------------------------------------------------------------------

def scalar_moment_table(alpha, beta, K: int) -> list[GaussianRational]:
    """Normalized moments ``m_0..m_K`` of ``z^alpha exp(-beta/z)`` on the loop around infinity.

    With ``a = alpha + 2``: ``m_0 = 1`` and ``(a + n) m_{n+1} = -beta m_n``.
    """
    alpha = as_rational(alpha)
    beta = as_gr(beta)
    a = alpha + 2
    out = [ONE]
    for n in range(K):
        d = a + n
        if d == 0:
            raise ParameterDegenerate(f"moment recurrence breaks: alpha + 2 + {n} = 0")
        out.append(-beta * out[-1] / d)
    return out


def matrix_moment_table(spec: WeightSpec, K: int) -> MomentTable:
    """``W_n = sum_k Phi_k m_{n+k}`` for ``n = 0..K``."""
    deg = spec.phi.degree
    m = scalar_moment_table(spec.alpha, spec.beta, K + deg)
    out = []
    for n in range(K + 1):
        acc = MatrixGR.zeros(spec.N)
        for k, c in enumerate(spec.phi.coeffs):
            acc = acc + c.scale(m[n + k])
        out.append(acc)
    return MomentTable(tuple(out))


def pairing(p: MatPoly, table: MomentTable, q: MatPoly) -> MatrixGR:
    """``<p, q>_W = sum_{i,j} p_i W_{i+j} q_j``."""
    n = table.N
    acc = MatrixGR.zeros(p.shape[0], q.shape[1])
    need = p.degree + q.degree
    if need >= len(table):
        raise ValueError(f"pairing needs moments through W_{need}, table has {len(table)}")
    for i, pi in enumerate(p.coeffs):
        if pi.is_zero():
            continue
        for j, qj in enumerate(q.coeffs):
            if qj.is_zero():
                continue
            acc = acc + pi.matmul(table[i + j]).matmul(qj)
    return acc


def pearson_moment_residual(spec: WeightSpec, table: MomentTable, n_max: int | None = None,
                            pearson: PearsonData | None = None) -> ResidualReport:
    """Moment shadow of the Pearson equation.

    Integrating ``z^n (z^2 W)'`` over the closed loop gives
    ``R_n = (n+2) W_{n+1} + sum_k hL_k W_{n+k} + sum_k W_{n+k} hR_k = 0``.
    """
    pearson = pearson or spec.pearson
    report = ResidualReport("pearson_moments")
    if pearson is None:
        report.skip("no Pearson data declared")
        return report
    n_top = len(table) - 3 if n_max is None else n_max
    if n_top + 2 >= len(table):
        raise ValueError(f"table too short for n_max={n_top}")
    for n in range(n_top + 1):
        r = table[n + 1].scale(n + 2)
        for k in range(3):
            r = r + pearson.hL[k].matmul(table[n + k]) + table[n + k].matmul(pearson.hR[k])
        report.add(n, r)
    return report


def stieltjes_series(table: MomentTable, K: int) -> LaurentTail:
    """``S_W(z) = -sum_{k=0..K} W_k z^{-k-1}``, known through ``z^{-K-1}``."""
    if K + 1 > len(table):
        raise ValueError(f"need {K + 1} moments, table has {len(table)}")
    terms = {-k - 1: -table[k] for k in range(K + 1)}
    return LaurentTail(terms, (table.N, table.N), -K - 1)
