from __future__ import annotations

import numpy as np
import pytest

from qudecay import _kernels

# Trajectories produced while running the acceptance tests, keyed by a short
# label.  The state-invariant criterion iterates over everything collected
# here, so it must run after the others (test files run in name order and
# the invariant test is defined last in test_acceptance.py).
ACCEPTANCE_TRAJECTORIES: dict = {}

# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Force JIT compilation outside any timed block.
    _kernels.warmup()
    yield


@pytest.fixture()
def rng():
    return np.random.default_rng(20260818)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
