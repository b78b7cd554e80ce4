"""Regenerate the shipped weight specs in ``specs/`` from the closed-form example classes."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from mbl.closed_forms import ClassicalExample, SemiclassicalExample, TriangularExample
from mbl.exactnum import as_gr
from mbl.polymat import MatPoly, MatrixGR
from mbl.weights import PearsonData, WeightSpec, format_weight_spec, parse_weight_spec


@dataclass
class SpecConfig:
    out_dir: Path = Path(__file__).resolve().parent.parent / "specs"
    examples: list[tuple[str, tuple]] = field(default_factory=lambda: [
        ("classical_a3_b1_c1", ("classical", 3, 1, 1)),
        ("classical_a5h_b2_c1t", ("classical", Fraction(5, 2), 2, Fraction(1, 3))),
        ("semiclassical_a3_b1_c1", ("semiclassical", 3, 1, 1)),
        ("triangular_a3_b1_c1", ("triangular", 3, 1, 1)),
    ])


def scalar_spec(name: str, alpha, beta, one_sided: bool) -> WeightSpec:
    """``z^alpha exp(-beta/z)`` with Pearson data either all on the left or split evenly."""
    beta = as_gr(beta)
    h0 = MatrixGR.scalar(1, beta)
    h1 = MatrixGR.scalar(1, alpha)
    zero = MatrixGR.zeros(1)
    if one_sided:
        pearson = PearsonData((h0, h1, zero), (zero, zero, zero))
    else:
        half = Fraction(1, 2)
        pearson = PearsonData((h0.scale(half), h1.scale(half), zero), (h0.scale(half), h1.scale(half), zero))
    return WeightSpec(1, Fraction(alpha), beta, MatPoly.scalar_times([1], 1), pearson, name=name)


def nonabelian_spec() -> WeightSpec:
    """One-sided ``[[1, z^2], [0, z]] z^1 exp(-1/z)``: ``h1`` and ``h2`` do not commute."""
    m = MatrixGR.from_rows
    phi = MatPoly([m([[1, 0], [0, 0]]), m([[0, 0], [0, 1]]), m([[0, 1], [0, 0]])])
    hl = (m([[1, 0], [0, 1]]), m([[1, 0], [0, 2]]), m([[0, 2], [0, 0]]))
    return WeightSpec(2, Fraction(1), as_gr(1), phi, PearsonData(hl, (MatrixGR.zeros(2),) * 3),
                      name="nonabelian_one_sided")


def build_specs(cfg: SpecConfig) -> dict[str, WeightSpec]:
    kinds = {"classical": ClassicalExample, "semiclassical": SemiclassicalExample,
             "triangular": TriangularExample}
    specs = {
        "scalar_a3_b1": scalar_spec("scalar_a3_b1", 1, 1, one_sided=True),
        "scalar_a5h_b2": scalar_spec("scalar_a5h_b2", Fraction(1, 2), 2, one_sided=False),
        "scalar_a3_b1pi": scalar_spec("scalar_a3_b1pi", 1, "1+i", one_sided=False),
        "nonabelian_one_sided": nonabelian_spec(),
    }
    for fname, (kind, a, b, c) in cfg.examples:
        specs[fname] = kinds[kind](a, b, c).weight()
    return specs


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=SpecConfig.out_dir)
    cfg = SpecConfig(out_dir=ap.parse_args(argv).out_dir)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for fname, spec in build_specs(cfg).items():
        text = format_weight_spec(spec)
        parse_weight_spec(text)  # round trip, including the Pearson check
        (cfg.out_dir / f"{fname}.wspec").write_text(text, encoding="utf-8")
        print(f"wrote {fname}.wspec")


if __name__ == "__main__":
    main()
