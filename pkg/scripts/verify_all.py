"""Run ``mbl verify`` on every shipped spec and print a one-line summary per spec."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from mbl.cli import main as mbl_main


@dataclass
class BatchConfig:
    specs_dir: Path = Path(__file__).resolve().parent.parent / "specs"
    out_dir: Path = Path("out/verify_all")
    n_max: int = 7
    trunc: int = 8


def run(cfg: BatchConfig) -> int:
    worst = 0
    t_all = time.perf_counter()
    for path in sorted(cfg.specs_dir.glob("*.wspec")):
        t0 = time.perf_counter()
        code = mbl_main(["verify", "--weight", str(path), "--nmax", str(cfg.n_max), "--trunc", str(cfg.trunc),
                         "--out", str(cfg.out_dir / path.stem)])
        print(f"== {path.stem}: exit {code} in {time.perf_counter() - t0:.2f}s")
        worst = max(worst, code)
    print(f"total {time.perf_counter() - t_all:.2f}s")
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=BatchConfig.n_max)
    ap.add_argument("--trunc", type=int, default=BatchConfig.trunc)
    ap.add_argument("--out", type=Path, default=BatchConfig.out_dir)
    a = ap.parse_args()
    raise SystemExit(run(BatchConfig(out_dir=a.out, n_max=a.nmax, trunc=a.trunc)))
