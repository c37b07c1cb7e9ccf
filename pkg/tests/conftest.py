import math
import warnings

import numpy as np
import pytest

from tglattice import LatticeConfig, ground_state_occupation


def dimensionless(M, q):
    return LatticeConfig(M=M, q_value=q, mass=None, magnetic_moment=None)


@pytest.fixture(scope="session")
def free7():
    return dimensionless(7, 0.0)


@pytest.fixture(scope="session")
def lattice7():
    return dimensionless(7, 1.0)


@pytest.fixture(scope="session")
def state_free_3(free7):
    return ground_state_occupation(free7, 3)


@pytest.fixture(scope="session")
def states_q1():
    cfg = dimensionless(7, 1.0)
    return {N: ground_state_occupation(cfg, N) for N in (1, 3, 5, 7)}


@pytest.fixture(scope="session")
def state_n2_m3():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ground_state_occupation(dimensionless(3, 1.0), 2, allow_even=True)


def box_quadrature(M, n=4096):
    """Periodic trapezoid nodes and weights on [0, M pi)."""
    L = M * math.pi
    z = np.arange(n) * (L / n)
    return z, np.full(n, L / n)


# one "criterion k: PASS/FAIL (...)" line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
