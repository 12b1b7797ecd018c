import warnings

import numpy as np
import pytest

from tomochannels.exceptions import TruncationWarning


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def quiet():
    """Silence truncation warnings for grids where outputs touch the edge."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance" in rep.nodeid and rep.when == "call":
                lines += [l for l in rep.capstdout.splitlines() if l.startswith("[criterion")]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
