import numpy as np
import pytest

from mkflats import _kernels

BACKENDS = ["python"] + (["cython"] if _kernels.BACKEND == "cython" else [])

# criterion lines appended by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
