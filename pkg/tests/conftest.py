import numpy as np
import pytest

import braidmu as bm

ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def record_acceptance(name: str, passed: bool):
    ACCEPTANCE_RESULTS.append((name, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, passed in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}")


@pytest.fixture(scope="session")
def z2():
    return bm.kac_takesaki(bm.cyclic(2))


@pytest.fixture(scope="session")
def z3():
    return bm.kac_takesaki(bm.cyclic(3))


@pytest.fixture(scope="session")
def s3():
    return bm.kac_takesaki(bm.symmetric(3))


@pytest.fixture(scope="session")
def super_module():
    """The Z2 module with grading (0, 1) and the sign action."""
    module, mu = bm.group_yd_module(bm.cyclic(2), [0, 1],
                                    [np.eye(2), np.diag([1.0, -1.0])])
    return module, mu


@pytest.fixture(scope="session")
def super_space():
    return bm.Space("S", 2, (0, 1))


def random_unitary(n, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))
