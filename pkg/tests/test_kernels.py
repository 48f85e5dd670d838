import numpy as np
import pytest

from tfim_bench import kernels
from tfim_bench.spin_model import SpinChainModel, build_hamiltonian

IMPLS = kernels.implementations()
requires_numba = pytest.mark.skipif("numba" not in IMPLS, reason="numba not importable")


def random_ops(rng, n, g):
    kinds = rng.integers(0, 3, g).astype(np.int64)
    a = rng.integers(0, n, g).astype(np.int64)
    b = (a + rng.integers(1, n, g)) % n
    b = np.where(kinds == kernels.RZZ, b, a).astype(np.int64)
    angles = rng.uniform(-np.pi, np.pi, g)
    return kinds, a, b, angles


def test_backend_flag_is_consistent():
    assert kernels.BACKEND in IMPLS
    assert kernels.apply_ops is IMPLS[kernels.BACKEND].apply_ops


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_energy_kernel_matches_dense(name, rng):
    impl = IMPLS[name]
    for n in (2, 3, 5):
        psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        psi /= np.linalg.norm(psi)
        H = build_hamiltonian(SpinChainModel(n, 0.7, 1.3))
        assert impl.tfim_energy(psi, n, 0.7, 1.3) == pytest.approx(np.vdot(psi, H @ psi).real,
                                                                   abs=1e-12)


@requires_numba
def test_apply_ops_paths_agree(rng):
    ops = random_ops(rng, 5, 200)
    a = np.zeros(32, complex)
    a[0] = 1
    b = a.copy()
    IMPLS["numpy"].apply_ops(a, *ops)
    IMPLS["numba"].apply_ops(b, *ops)
    np.testing.assert_allclose(a, b, atol=1e-13)


@requires_numba
def test_noisy_trajectory_paths_agree(rng):
    ops = random_ops(rng, 4, 60)
    fire = rng.random(60) < 0.3
    pick = rng.integers(0, 15, 60)
    a = np.zeros(16, complex)
    a[3] = 1
    b = a.copy()
    IMPLS["numpy"].noisy_trajectory(a, *ops, fire, pick)
    IMPLS["numba"].noisy_trajectory(b, *ops, fire, pick)
    np.testing.assert_allclose(a, b, atol=1e-13)


@requires_numba
def test_noisy_sample_paths_agree(rng):
    ops = random_ops(rng, 4, 30)
    shots = 1500
    fire = rng.random((shots, 30)) < 0.1
    pick = rng.integers(0, 15, (shots, 30))
    u = rng.random(shots)
    psi0 = np.zeros(16, complex)
    psi0[0] = 1
    a = IMPLS["numpy"].noisy_sample(psi0, *ops, fire, pick, u)
    b = IMPLS["numba"].noisy_sample(psi0, *ops, fire, pick, u)
    assert np.count_nonzero(a != b) == 0
    np.testing.assert_array_equal(psi0[0], 1)


@requires_numba
def test_sample_state_paths_agree(rng):
    psi = rng.normal(size=64) + 0j
    psi /= np.linalg.norm(psi)
    u = rng.random(5000)
    np.testing.assert_array_equal(IMPLS["numpy"].sample_state(psi, u),
                                  IMPLS["numba"].sample_state(psi, u))


@pytest.mark.parametrize("name", sorted(IMPLS))
def test_sample_state_edges(name):
    psi = np.array([0, 1, 0, 0], complex)
    idx = IMPLS[name].sample_state(psi, np.array([0.0, 0.5, 0.999999999]))
    np.testing.assert_array_equal(idx, [1, 1, 1])


@requires_numba
def test_jacobi_paths_agree(rng):
    a = rng.normal(size=(20, 20))
    a = a + a.T
    d1, v1, *_ = IMPLS["numpy"].jacobi_eigh(a.copy(), 1e-12, 100)
    d2, v2, *_ = IMPLS["numba"].jacobi_eigh(a.copy(), 1e-12, 100)
    np.testing.assert_allclose(np.sort(d1), np.sort(d2), atol=1e-10)
