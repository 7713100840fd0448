import numpy as np
import pytest

from gmqep.checker import enumerate_params

# numpy's LAPACK eigensolver is the independent oracle throughout the tests
def lapack_eigs(m):
    return np.sort(np.linalg.eigvalsh(np.asarray(m, dtype=float)))[::-1]


def path_laplacian(n):
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = 1.0
    return np.diag(a.sum(axis=1)) - a


@pytest.fixture(scope="session")
def lattice():
    """Every instance with n <= 8 and pendant counts <= 4."""
    return list(enumerate_params(8, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
