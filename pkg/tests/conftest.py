import numpy as np
import pytest

from mbmsq import (
    bpsk,
    build_constellation,
    build_shortened_rs,
    conventional_set,
    field_new,
    pair_classes,
    proposed_set,
)

_REPORT: list[str] = []


def coded_set(m_rf, N=4, K=2, M=2, poly=None):
    L = (2 * N).bit_length() - 1
    return proposed_set(build_shortened_rs(field_new(m_rf, poly), N, K), build_constellation(M, L))


@pytest.fixture(scope="session")
def report():
    """Collects one PASS/FAIL line per acceptance criterion."""
    return _REPORT


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def set16():
    return coded_set(4)


@pytest.fixture(scope="session")
def set64():
    return coded_set(6)


@pytest.fixture(scope="session")
def conv1():
    return conventional_set(1, bpsk())


@pytest.fixture(scope="session")
def conv2():
    return conventional_set(2, bpsk())


@pytest.fixture(scope="session")
def classes16(set16):
    return pair_classes(set16)


@pytest.fixture(scope="session")
def classes64(set64):
    return pair_classes(set64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
