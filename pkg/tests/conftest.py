import numpy as np
import pytest

from mellin_hilbert.catalog import get_entry
from mellin_hilbert.quadrature import DEFAULT_SPEC
from mellin_hilbert.solver import classify, solve

# criterion number -> (passed, summary line); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {line}")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def indicator_solution():
    """Report and both branches for e = indicator01 (computed once per session)."""
    e = get_entry("indicator01")
    rep = classify(e.function, DEFAULT_SPEC, transform=e.known_mellin)
    minus, plus = solve(e.function, rep, spec=DEFAULT_SPEC)
    return e, rep, minus, plus
