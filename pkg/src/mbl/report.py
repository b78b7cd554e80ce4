"""Residual reports: the common currency of every identity check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .exactnum import GaussianRational, format_scalar

__all__ = ["ResidualEntry", "ResidualReport", "residual_is_zero", "encode_residual"]


def residual_is_zero(r: Any) -> bool:
    if r is None:
        return True
    if isinstance(r, GaussianRational):
        return r.is_zero()
    if isinstance(r, (list, tuple)):
        return all(residual_is_zero(x) for x in r)
    if hasattr(r, "all_zero"):
        return r.all_zero()
    if hasattr(r, "is_zero"):
        return r.is_zero()
    return r == 0


def encode_residual(r: Any):
    """JSON form: ``"zero"`` for vanishing residuals, otherwise the object's encoding."""
    if residual_is_zero(r):
        return "zero"
    if isinstance(r, GaussianRational):
        return format_scalar(r)
    if isinstance(r, (list, tuple)):
        return [encode_residual(x) for x in r]
    if hasattr(r, "assemble"):
        r = r.assemble()
    if hasattr(r, "to_json"):
        return r.to_json()
    return str(r)


@dataclass
class ResidualEntry:
    n: int
    residual: Any
    passed: bool
    section: str = "main"
    note: str = ""

    def to_json(self) -> dict:
        out = {"n": self.n, "residual": encode_residual(self.residual), "pass": self.passed}
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class ResidualReport:
    """Per-identity list of residuals indexed by degree.

    Entries in the ``"convention"`` section depend on the ``C_{-1} := 0``
    convention and are kept apart from the main verdict.
    """

    identity: str
    entries: list[ResidualEntry] = field(default_factory=list)
    skipped: str | None = None
    notes: list[str] = field(default_factory=list)
    anchor: str = ""

    def add(self, n: int, residual: Any, *, section: str = "main", note: str = "",
            expect_zero: bool = True) -> ResidualEntry:
        zero = residual_is_zero(residual)
        entry = ResidualEntry(n, residual, zero if expect_zero else not zero, section, note)
        self.entries.append(entry)
        return entry

    def add_flag(self, n: int, ok: bool, *, section: str = "main", note: str = "") -> ResidualEntry:
        entry = ResidualEntry(n, None if ok else note or "failed", ok, section, note)
        self.entries.append(entry)
        return entry

    def skip(self, reason: str) -> None:
        self.skipped = reason

    def section(self, name: str) -> list[ResidualEntry]:
        return [e for e in self.entries if e.section == name]

    @property
    def passed(self) -> bool:
        """All main-section entries pass.  A skipped report counts as passed (vacuous)."""
        return all(e.passed for e in self.entries if e.section == "main")

    def passed_with_convention(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self, include_convention: bool = False) -> list[ResidualEntry]:
        return [e for e in self.entries
                if not e.passed and (include_convention or e.section == "main")]

    def first_failure(self) -> ResidualEntry | None:
        f = self.failures()
        return f[0] if f else None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"identity": self.identity, "pass": self.passed}
        if self.anchor:
            out["anchor"] = self.anchor
        if self.skipped is not None:
            out["skipped"] = self.skipped
        out["entries"] = [e.to_json() for e in self.entries if e.section == "main"]
        conv = [e.to_json() for e in self.entries if e.section == "convention"]
        if conv:
            out["convention_entries"] = conv
        extra = sorted({e.section for e in self.entries} - {"main", "convention"})
        if extra:
            out["sections"] = {name: [e.to_json() for e in self.section(name)] for name in extra}
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def summary_line(self) -> str:
        if self.skipped is not None:
            return f"{self.identity}: skipped ({self.skipped})"
        main = self.section("main")
        ok = sum(e.passed for e in main)
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.identity}: {verdict} {ok}/{len(main)}"
