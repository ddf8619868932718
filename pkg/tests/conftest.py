import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from secrexp.channel import bsc, bsc_pair  # noqa: E402

DATA = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")

# criterion id -> list of (part, ok, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def record(criterion, part, ok, detail):
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion} [{part}]: {detail}"
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}: {'ok' if good else 'FAIL'} ({d})" for name, good, d in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {crit}: {detail}")


@pytest.fixture
def bsc_pair_ch():
    return bsc_pair(0.1, 0.2)


@pytest.fixture
def data_dir():
    return DATA
