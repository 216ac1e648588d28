import sys

import numpy as np
import pytest

from ptmachine import CycleParams


@pytest.fixture
def ref_point():
    """Engine-side reference point: mu=10, (omega1, omega2, beta, sigma) = (1, 2, 0.2, 0.1)."""
    return CycleParams.with_mu(10.0, omega1=1.0, omega2=2.0, beta=0.2, sigma=0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        terminalreporter.write_line(verdicts[number])
