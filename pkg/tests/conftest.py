import numpy as np
import pytest

from vqss import kernels
from vqss.gf import PrimeModulus


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def gf7():
    return PrimeModulus(7)


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    before = kernels.backend()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(before)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(number, title, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number}: {title} | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
