import sys
import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rank_k_tensor(rng, shape, k, low=0.1, high=1.0):
    """Exact non-negative rank-``k`` tensor and its factors."""
    a, b, c = (rng.uniform(low, high, size=(d, k)) for d in shape)
    x = np.einsum("fk,tk,nk->ftn", a, b, c)
    return x, (a, b, c)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
