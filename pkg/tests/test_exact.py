import numpy as np
import pytest

from tfim_bench.errors import ConvergenceError, ValidationError
from tfim_bench.exact import (EXCLUDE_DIAGONAL, INCLUDE_DIAGONAL, diagonalize, exact_sweep,
                              observables, order_parameter, zz_correlation_matrix)
from tfim_bench.spin_model import SpinChainModel, build_hamiltonian

from conftest import random_state

GRID = [0.2, 0.6, 1.0, 1.4, 1.8]
# published exact columns, four decimals
E_EXACT = [-3.0617, -3.6314, -4.7588, -6.1403, -7.6191]
MZ_EXACT = [0.8541, 0.7259, 0.5510, 0.4410, 0.3741]

MODEL = SpinChainModel(4, 1.0, 0.0)


def test_diagonal_input():
    res = diagonalize(np.diag([-1.0, 1.0, 1.0, -1.0]))
    np.testing.assert_array_equal(res.eigenvalues, [-1.0, -1.0, 1.0, 1.0])
    assert res.degeneracy_gap == 0.0


@pytest.mark.parametrize("h, e0", [(1.4, -6.1403), (1.8, -7.6191)])
def test_published_ground_energies(h, e0):
    res = diagonalize(build_hamiltonian(MODEL.with_field(h)))
    assert res.ground_energy == pytest.approx(e0, abs=1e-4)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("h", [0.0, 0.35, 1.0, 2.2])
def test_spectrum_matches_lapack(n, h):
    H = build_hamiltonian(SpinChainModel(n, 1.0, h))
    res = diagonalize(H)
    np.testing.assert_allclose(res.eigenvalues, np.linalg.eigvalsh(H), atol=1e-10)
    assert np.all(np.diff(res.eigenvalues) >= 0)
    v = res.ground_vector
    assert abs(np.linalg.norm(v) - 1) < 1e-10
    assert np.max(np.abs(H @ v - res.ground_energy * v)) < 1e-9
    # full orthonormal eigenbasis
    np.testing.assert_allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(2**n), atol=1e-10)


def test_random_symmetric_matrix(rng):
    a = rng.normal(size=(24, 24))
    a = a + a.T
    res = diagonalize(a)
    np.testing.assert_allclose(res.eigenvalues, np.linalg.eigvalsh(a), atol=1e-10)
    assert res.offdiag_norm < 1e-12


def test_rejects_asymmetric():
    with pytest.raises(ValidationError):
        diagonalize(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_reports_non_convergence(rng):
    a = rng.normal(size=(12, 12))
    a = a + a.T
    with pytest.raises(ConvergenceError) as info:
        diagonalize(a, max_sweeps=1)
    assert info.value.residual > 1e-12


def test_order_parameter_limits():
    assert order_parameter(np.ones((4, 4)), INCLUDE_DIAGONAL) == 1.0
    assert order_parameter(np.eye(4), INCLUDE_DIAGONAL) == 0.5
    assert order_parameter(np.eye(4), EXCLUDE_DIAGONAL) == 0.0


def test_order_parameter_clamps_negative_noise():
    c = np.eye(3)
    c[0, 1] = c[1, 0] = -1e-14
    assert order_parameter(c, EXCLUDE_DIAGONAL) == 0.0


def test_order_parameter_rejects_asymmetric():
    c = np.eye(3)
    c[0, 1] = 0.5
    with pytest.raises(ValidationError):
        order_parameter(c)


def test_exclude_diagonal_reproduces_published_column():
    # oracle: LAPACK ground state, correlations contracted independently
    for h, mz in zip(GRID, MZ_EXACT):
        w, v = np.linalg.eigh(build_hamiltonian(MODEL.with_field(h)))
        corr = zz_correlation_matrix(v[:, 0], 4)
        assert order_parameter(corr, EXCLUDE_DIAGONAL) == pytest.approx(mz, abs=1e-4)
        # the diagonal-inclusive form is bounded below by 1/sqrt(N) and cannot match
        assert order_parameter(corr, INCLUDE_DIAGONAL) >= 0.5


def test_exact_sweep_published_values():
    obs = exact_sweep(MODEL, GRID)
    np.testing.assert_allclose([o.energy for o in obs], E_EXACT, atol=1e-4)
    np.testing.assert_allclose([o.order_parameter for o in obs], MZ_EXACT, atol=1e-4)
    assert obs[2].order_parameter == pytest.approx(0.5510, abs=1e-4)


def test_zero_field_classical_ferromagnet():
    (o,) = exact_sweep(MODEL, [0.0])
    assert o.energy == -3.0
    assert o.degeneracy_gap == 0.0
    np.testing.assert_array_equal(o.zz_correlations, np.ones((4, 4)))


def test_zero_field_order_parameter_degeneracy_robust():
    # any vector in the {|0000>, |1111>} ground space gives the same correlations
    for vec in ([1, 0], [0, 1], [1 / np.sqrt(2), 1 / np.sqrt(2)]):
        psi = np.zeros(16)
        psi[0], psi[15] = vec
        corr = zz_correlation_matrix(psi, 4)
        assert order_parameter(corr, INCLUDE_DIAGONAL) == pytest.approx(1.0, abs=1e-15)
        assert order_parameter(corr, EXCLUDE_DIAGONAL) == pytest.approx(np.sqrt(3) / 2, abs=1e-15)


def test_sweep_invariants(rng):
    obs = exact_sweep(MODEL, np.linspace(0.2, 1.8, 17))
    for o in obs:
        H = build_hamiltonian(MODEL.with_field(o.field))
        assert o.residual < 1e-9
        c = o.zz_correlations
        np.testing.assert_allclose(c, c.T, atol=1e-10)
        np.testing.assert_allclose(np.diag(c), 1.0, atol=1e-10)
        assert np.all(c >= -1e-10) and np.all(c <= 1 + 1e-10)
        assert 0.0 <= o.order_parameter <= 1.0
        # finite chain keeps the spin-flip symmetry: no longitudinal magnetization
        assert np.max(np.abs(o.z_expectations)) < 1e-8
        for _ in range(100):
            psi = random_state(rng, 16)
            assert o.energy <= np.vdot(psi, H @ psi).real + 1e-12
    mz = [o.order_parameter for o in obs]
    assert np.all(np.diff(mz) < 0)


def test_sweep_rejects_bad_grids():
    with pytest.raises(ValidationError):
        exact_sweep(MODEL, [])
    with pytest.raises(ValidationError):
        exact_sweep(MODEL, [-0.1])


def test_parallel_sweep_matches_serial():
    a = exact_sweep(MODEL, GRID)
    b = exact_sweep(MODEL, GRID, workers=3)
    assert [o.energy for o in a] == [o.energy for o in b]


def test_observables_x_expectations_against_dense():
    o = observables(MODEL.with_field(1.0))
    w, v = np.linalg.eigh(build_hamiltonian(MODEL.with_field(1.0)))
    g = v[:, 0]
    k = np.arange(16)
    assert o.x_mean == pytest.approx(np.mean([g @ g[k ^ (1 << i)] for i in range(4)]), abs=1e-10)
