import numpy as np
import pytest

from qmono.qmat import DensityMatrix
from qmono.states import SeededSampler, haar_random_pure, random_density_matrix

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=range(5))
def rng(request):
    return np.random.default_rng(request.param)


@pytest.fixture
def random_two_qubit():
    return [random_density_matrix(SeededSampler(11, i), (2, 2)) for i in range(8)]


@pytest.fixture
def haar3():
    return [haar_random_pure(SeededSampler(5, i), 3) for i in range(8)]


def random_unitary(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def conjugate(rho, u):
    return DensityMatrix(u @ rho.data @ u.conj().T, rho.dims)
