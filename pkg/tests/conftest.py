import numpy as np
import pytest

I2 = np.eye(2)
X2 = np.array([[0.0, 1.0], [1.0, 0.0]])
Y2 = np.array([[0.0, -1j], [1j, 0.0]])
Z2 = np.diag([1.0, -1.0])
PAULIS = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def kron_string(ops: dict, n: int) -> np.ndarray:
    """Kronecker-product oracle; site 0 is the least significant bit, i.e. the last factor."""
    out = np.array([[1.0]])
    for site in reversed(range(n)):
        out = np.kron(out, ops.get(site, I2))
    return out


def kron_hamiltonian(n, j, h):
    H = np.zeros((2**n, 2**n))
    for i in range(n - 1):
        H -= j * kron_string({i: Z2, i + 1: Z2}, n)
    for i in range(n):
        H -= h * kron_string({i: X2}, n)
    return H


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
