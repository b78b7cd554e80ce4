from __future__ import annotations

import functools
import sys
from pathlib import Path

import pytest

from mbl.suites import VerifyContext
from mbl.weights import load_weight_spec

SPECS = Path(__file__).resolve().parent.parent / "specs"


def spec_path(name: str) -> Path:
    return SPECS / f"{name}.wspec"


@functools.lru_cache(maxsize=None)
def context(name: str, n_max: int = 7, K: int = 8) -> VerifyContext:
    """Shared, read-only context per (spec, n_max, K); building it is the slow part."""
    ctx = VerifyContext(load_weight_spec(spec_path(name)), n_max, K)
    ctx.prepare()
    return ctx


@pytest.fixture
def specs_dir() -> Path:
    return SPECS


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
