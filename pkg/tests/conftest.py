import numpy as np
import pytest
from hypothesis import settings

from vlab import build_basis

settings.register_profile("vlab", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("vlab")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def mixed():
    return build_basis((2, 3, 2, 4, 2, 3), 6)


@pytest.fixture(scope="session")
def dyadic8():
    return build_basis(2, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
