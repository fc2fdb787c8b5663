"""Shared helpers: run a program in the clear and at three parties."""

from __future__ import annotations

import numpy as np
import pytest

from oblivfp.execute import run_plain, run_secure
from oblivfp.fixedpoint import DEFAULT_FORMAT

K = DEFAULT_FORMAT.k
ONE = 1 << K


def both(program, *, fmt=DEFAULT_FORMAT, seed=0, exact=True, n=3, t=1):
    """(plain outputs, secure outputs, run handle)."""
    plain, _ = run_plain(program, fmt, seed=seed)
    sec, h = run_secure(program, n=n, t=t, seed=seed, fmt=fmt, trunc_exact=exact)
    return plain, sec, h


def secure(program, **kw):
    kw.setdefault("trunc_exact", True)
    return run_secure(program, **kw)


def fx(raw) -> np.ndarray:
    """Raw k-bit fixed-point integers as floats."""
    return np.asarray(raw, dtype=object).astype(float) / ONE


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# ------------------------------------------------------- acceptance summary
ACCEPTANCE_LINES: list = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    """Print one pass/fail line, keep it for the session summary, then assert."""
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
