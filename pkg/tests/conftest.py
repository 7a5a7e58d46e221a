import numpy as np
import pytest

from fovkit import boundary, repro

DISK = np.array([[0, 2], [0, 0]], dtype=complex)
TRIANGLE = np.diag([0, 1, 1j]).astype(complex)


def random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_normal(rng, n):
    from fovkit import matcore

    U = matcore.random_unitary(n, rng)
    mu = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return U @ np.diag(mu) @ U.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def disk_curve():
    return boundary.trace_boundary(DISK)


@pytest.fixture(scope="session")
def triangle_curve():
    return boundary.trace_boundary(TRIANGLE)


@pytest.fixture(scope="session")
def example_curves():
    cache = {}

    def get(eid):
        if eid not in cache:
            inst = repro.load_example(eid)
            cache[eid] = (inst, boundary.trace_boundary(inst.matrix))
        return cache[eid]

    return get
