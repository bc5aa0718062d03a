import numpy as np
import pytest

# check matrix used throughout the hand-worked examples: [P | I]
H_SMALL = np.array([[1, 0, 1, 0],
                    [1, 1, 0, 1]], dtype=np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


INVARIANT_OUTCOMES = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if name.startswith("test_invariant") and report.when == "call":
        INVARIANT_OUTCOMES[name.split("[")[0]] = report.outcome
    elif name.startswith("test_invariant") and report.failed:
        INVARIANT_OUTCOMES[name.split("[")[0]] = "failed"
