"""``mbl`` command line: moments, MOPs, identity verification and plot exports."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .errors import MblError
from .exactnum import format_scalar
from .mops import solve_mops
from .polymat import MatrixGR
from .suites import SUITES, VerifyContext, run_suites, thread_cap
from .weights import (MomentTable, WeightSpec, load_weight_spec, matrix_moment_table,
                      pearson_moment_residual)

log = logging.getLogger("mbl")

__all__ = ["RunConfig", "main", "dump_json", "decimal_string"]


@dataclass
class RunConfig:
    command: str
    weight: Path
    n_max: int = 6
    trunc: int = 8
    out: Path = Path("out")
    suites: list[str] = field(default_factory=list)
    include_n0: bool = False
    moments: Path | None = None
    precision: int = 12
    series: list[str] | None = None

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("--nmax must be >= 0")
        if self.trunc < 1:
            raise ValueError("--trunc must be >= 1")


def dump_json(obj, path: Path) -> None:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    path.write_text(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _dec(q: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def decimal_string(x, digits: int = 12) -> str:
    """Presentation-only decimal rendering of an exact scalar."""
    if not x.im:
        return _dec(x.re, digits)
    im = _dec(abs(x.im), digits)
    return f"{_dec(x.re, digits)}{'-' if x.im < 0 else '+'}{im}i"


# -- shared loading ------------------------------------------------------------------

def _load_table(cfg: RunConfig, spec: WeightSpec, size: int) -> MomentTable:
    """``size`` moments ``W_0..W_{size-1}``, computed or read from ``--moments``."""
    if cfg.moments is None:
        return matrix_moment_table(spec, size - 1)
    try:
        table = MomentTable.from_json(json.loads(cfg.moments.read_text(encoding="utf-8")))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise MblError(f"cannot read moments file {cfg.moments}: {exc}") from exc
    if table.N != spec.N:
        raise MblError(f"moments file has {table.N}x{table.N} blocks, spec has dim {spec.N}")
    if len(table) < size:
        raise MblError(f"moments file has {len(table)} moments, need {size}")
    return table


# -- commands ---------------------------------------------------------------------------

def cmd_moments(cfg: RunConfig, spec: WeightSpec) -> int:
    # 2 n_max + 3 moments: enough for the MOPs through n_max and P_{n_max+1}
    table = matrix_moment_table(spec, 2 * cfg.n_max + 2)
    dump_json({"weight": spec.name, **table.to_json()}, cfg.out / "moments.json")
    if spec.pearson is not None:
        dump_json(pearson_moment_residual(spec, table).to_json(), cfg.out / "pearson_residuals.json")
    return 0


def _matrix_cols(name: str, m: MatrixGR) -> list[str]:
    return [f"{name}_{i + 1}{j + 1}" for i in range(m.n_rows) for j in range(m.n_cols)]


def _matrix_vals(m: MatrixGR, render) -> list[str]:
    return [render(m[i, j]) for i in range(m.n_rows) for j in range(m.n_cols)]


def cmd_mops(cfg: RunConfig, spec: WeightSpec) -> int:
    table = _load_table(cfg, spec, 2 * cfg.n_max + 2)
    data = solve_mops(table, cfg.n_max)
    dump_json({"weight": spec.name, **data.to_json()}, cfg.out / "mops.json")
    seqs = {"xi": data.xiL, "eta": data.etaL, "Cinv": data.Cinv, "C": data.C}
    with open(cfg.out / "coefficients.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n"] + [c for k, v in seqs.items() for c in _matrix_cols(k, v[0])])
        for n in range(cfg.n_max + 1):
            w.writerow([n] + [x for v in seqs.values() for x in _matrix_vals(v[n], format_scalar)])
    return 0


def cmd_verify(cfg: RunConfig, spec: WeightSpec) -> int:
    names = cfg.suites or list(SUITES)
    out = {"weight": spec.name, "n_max": cfg.n_max, "trunc": cfg.trunc,
           "include_n0": cfg.include_n0, "suites": {}}
    ctx = VerifyContext(spec, cfg.n_max, cfg.trunc, cfg.include_n0)
    code = 0
    try:
        if cfg.moments is not None:
            ctx._cache["table"] = _load_table(cfg, spec, VerifyContext.moments_needed(cfg.n_max, cfg.trunc))
        out["suites"] = run_suites(ctx, names)
    except MblError as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
        log.error("%s", out["error"])
        code = 1
    out["pass"] = code == 0 and all(s["pass"] for s in out["suites"].values())
    dump_json(out, cfg.out / "report.json")
    for name, s in out["suites"].items():
        line = s.get("skipped") or s.get("error") or "; ".join(s.get("summary", []))
        print(f"{name}: {s['status']} ({line})")
    return 0 if out["pass"] else 1


_PLOT_SCRIPT = '''"""Plot coefficient trajectories exported by ``mbl plot``."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("trajectories.csv")
with open(path, newline="") as fh:
    rows = list(csv.DictReader(fh))
cols = [c for c in (rows[0].keys() if rows else []) if c != "n"]
fig, ax = plt.subplots()
for c in cols:
    xs, ys = [], []
    for r in rows:
        try:
            ys.append(float(r[c]))
            xs.append(int(r["n"]))
        except ValueError:
            pass  # complex entries are skipped
    if xs:
        ax.plot(xs, ys, marker="o", label=c)
ax.set_xlabel("n")
if cols:
    ax.legend(fontsize="small")
fig.savefig(path.with_suffix(".png"), dpi=120)
'''


def cmd_plot(cfg: RunConfig, spec: WeightSpec) -> int:
    table = _load_table(cfg, spec, 2 * cfg.n_max + 2)
    data = solve_mops(table, cfg.n_max)
    seqs: dict[str, list[MatrixGR]] = {"xi": list(data.xiL), "eta": list(data.etaL)}
    if spec.pearson is not None:
        h0, h1, h2 = spec.pearson.hL
        eye = MatrixGR.identity(spec.N)
        seqs["nu"] = [h0.scale(Fraction(1, 2)) + h2.matmul(data.etaL[n]) - data.p1L(n)
                      for n in range(cfg.n_max + 1)]
        seqs["mu"] = [h2.matmul(data.xiL[n]) + h1 + eye.scale(2 * n + 1) for n in range(cfg.n_max + 1)]
    chosen = list(seqs) if cfg.series is None else [s for s in cfg.series if s in seqs]
    render = lambda x: decimal_string(x, cfg.precision)  # noqa: E731
    with open(cfg.out / "trajectories.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n"] + [c for k in chosen for c in _matrix_cols(k, seqs[k][0])])
        if chosen:
            for n in range(cfg.n_max + 1):
                w.writerow([n] + [x for k in chosen for x in _matrix_vals(seqs[k][n], render)])
    (cfg.out / "plot_trajectories.py").write_text(_PLOT_SCRIPT, encoding="utf-8")
    return 0


COMMANDS = {"moments": cmd_moments, "mops": cmd_mops, "verify": cmd_verify, "plot": cmd_plot}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mbl", description=__doc__)
    ap.add_argument("command", choices=list(COMMANDS))
    ap.add_argument("--weight", required=True, type=Path, help="weight spec file")
    ap.add_argument("--nmax", type=int, default=6, help="largest degree (default 6)")
    ap.add_argument("--trunc", type=int, default=8, help="Laurent truncation order K (default 8)")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    ap.add_argument("--suite", action="append", default=[], choices=list(SUITES),
                    help="restrict verify to these suites (repeatable)")
    ap.add_argument("--include-n0", action="store_true",
                    help="also report n = 0 entries that rely on the C_{-1} := 0 convention")
    ap.add_argument("--moments", type=Path, help="read moments from a moments.json instead of computing")
    ap.add_argument("--precision", type=int, default=12, help="significant digits in plot CSVs")
    ap.add_argument("--series", nargs="*", help="plot: sequences to export (xi eta nu mu)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig(args.command, args.weight, args.nmax, args.trunc, args.out, args.suite,
                        args.include_n0, args.moments, args.precision, args.series)
    except ValueError as exc:
        print(f"mbl: {exc}", file=sys.stderr)
        return 2
    cfg.out.mkdir(parents=True, exist_ok=True)
    try:
        spec = load_weight_spec(cfg.weight)
    except (OSError, MblError) as exc:
        print(f"mbl: {cfg.weight}: {exc}", file=sys.stderr)
        return 2
    log.info("%s on %s (n_max=%d, K=%d, threads<=%d)", cfg.command, spec.name, cfg.n_max, cfg.trunc,
             thread_cap())
    try:
        return COMMANDS[cfg.command](cfg, spec)
    except MblError as exc:
        print(f"mbl: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
