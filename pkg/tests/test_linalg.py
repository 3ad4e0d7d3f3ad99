import numpy as np
import pytest

from krylov_lab import (
    Eigensystem,
    EnsembleSpec,
    hermitian_eigendecompose,
    matrix_function,
    orthonormalize,
    phase_fix,
    sample_gue,
    spectral_norm,
)

from conftest import random_hermitian


class TestEigendecompose:
    def test_diagonal_input_sorts_ascending(self):
        es = hermitian_eigendecompose(np.diag([2.0, 1.0]))
        assert np.allclose(es.eigenvalues, [1.0, 2.0])
        # eigenvectors are a permutation of the identity up to phase
        assert np.allclose(np.abs(es.eigenvectors), [[0, 1], [1, 0]])

    def test_pauli_x(self, pauli_x):
        es = hermitian_eigendecompose(pauli_x)
        assert np.allclose(es.eigenvalues, [-1.0, 1.0])
        assert np.allclose(np.abs(es.eigenvectors), np.full((2, 2), 1 / np.sqrt(2)))

    def test_reconstruction_identity(self):
        H = random_hermitian(8, seed=11)
        es = hermitian_eigendecompose(H)
        R = (es.eigenvectors * es.eigenvalues) @ es.eigenvectors.conj().T
        assert np.max(np.abs(R - H)) <= 1e-9 * np.max(np.abs(H))

    def test_eigenvector_unitarity(self):
        es = hermitian_eigendecompose(random_hermitian(20, seed=3))
        G = es.eigenvectors.conj().T @ es.eigenvectors
        assert np.max(np.abs(G - np.eye(20))) <= 1e-10

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            hermitian_eigendecompose(np.ones((2, 3)))

    def test_rejects_non_hermitian(self):
        M = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eigendecompose(M)

    def test_eigensystem_rejects_unsorted(self):
        with pytest.raises(ValueError, match="ascending"):
            Eigensystem(eigenvalues=np.array([2.0, 1.0]), eigenvectors=np.eye(2))

    def test_eigensystem_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            Eigensystem(eigenvalues=np.array([1.0, 2.0]),
                        eigenvectors=np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestSpectralNorm:
    def test_diagonal(self):
        assert spectral_norm(np.diag([-3.0, 2.0])) == pytest.approx(3.0)

    def test_pauli_x(self, pauli_x):
        assert spectral_norm(pauli_x) == pytest.approx(1.0)

    def test_matches_power_iteration(self):
        H = sample_gue(EnsembleSpec(dim=50, seed=7))
        # power iteration on H^2 converges to sigma_max^2
        rng = np.random.default_rng(0)
        x = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        x /= np.linalg.norm(x)
        lam = 0.0
        for _ in range(10_000):
            y = H @ (H @ x)
            new = float(np.real(np.vdot(x, y)))
            x = y / np.linalg.norm(y)
            if abs(new - lam) <= 1e-12 * abs(new):
                lam = new
                break
            lam = new
        assert spectral_norm(H) == pytest.approx(np.sqrt(lam), rel=1e-8)


class TestMatrixFunction:
    def test_identity_function(self):
        H = random_hermitian(6, seed=5)
        assert np.max(np.abs(matrix_function(H, lambda x: x) - H)) <= 1e-10

    def test_half_period_exponential_squares_to_identity(self, pauli_x):
        U = matrix_function(pauli_x, lambda x: np.exp(-1j * np.pi * x))
        assert np.max(np.abs(U @ U - np.eye(2))) <= 1e-10
        assert np.max(np.abs(U.conj().T @ U - np.eye(2))) <= 1e-10

    def test_diagonal_exponential(self):
        U = matrix_function(np.diag([1.0, 2.0]), lambda x: np.exp(-1j * np.pi * x))
        assert np.allclose(U, np.diag([-1.0, 1.0]), atol=1e-12)

    def test_forward_backward_composes_to_identity(self):
        H = random_hermitian(9, seed=2)
        t = 0.73
        U = matrix_function(H, lambda x: np.exp(-1j * x * t))
        W = matrix_function(H, lambda x: np.exp(1j * x * t))
        assert np.max(np.abs(U @ W - np.eye(9))) <= 1e-9

    def test_rejects_non_elementwise_function(self):
        with pytest.raises(ValueError, match="elementwise"):
            matrix_function(np.eye(2), lambda x: np.array(1.0))


class TestOrthonormalize:
    def test_orthonormal_input_passes_through(self):
        basis, kept = orthonormalize([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert kept == [0, 1]
        assert np.allclose(basis, np.eye(2))

    def test_exact_duplicate_deflates(self):
        basis, kept = orthonormalize([np.array([1.0, 0.0]), np.array([1.0, 0.0])])
        assert kept == [0]
        assert basis.shape == (2, 1)

    def test_rank_detection_six_vectors_in_dim_four(self):
        rng = np.random.default_rng(17)
        vecs = [rng.standard_normal(4) + 1j * rng.standard_normal(4) for _ in range(6)]
        basis, kept = orthonormalize(vecs)
        # oracle: rank of the input Gram matrix
        V = np.column_stack(vecs)
        gram_eigs = np.linalg.eigvalsh(V.conj().T @ V)
        rank = int(np.sum(gram_eigs > 1e-10 * gram_eigs.max()))
        assert len(kept) == rank == 4
        G = basis.conj().T @ basis
        assert np.max(np.abs(G - np.eye(4))) <= 1e-10

    def test_span_preservation(self):
        rng = np.random.default_rng(4)
        vecs = [rng.standard_normal(5) + 1j * rng.standard_normal(5) for _ in range(5)]
        vecs.append(vecs[0] + vecs[1])  # dependent tail
        basis, _ = orthonormalize(vecs, deflation_tol=1e-8)
        P = basis @ basis.conj().T
        for v in vecs:
            assert np.linalg.norm(P @ v - v) <= 1e-8 * np.linalg.norm(v)

    def test_relative_tolerance_semantics(self):
        v = np.array([1.0, 0.0, 0.0])
        w = v + 1e-6 * np.array([0.0, 1.0, 0.0])
        _, kept_fine = orthonormalize([v, w], deflation_tol=1e-8)
        _, kept_coarse = orthonormalize([v, w], deflation_tol=1e-3)
        assert kept_fine == [0, 1]
        assert kept_coarse == [0]

    def test_empty_input_raises(self):
        with pytest.raises(ValueError, match="no vectors"):
            orthonormalize([])

    def test_accepts_column_matrix(self):
        M = np.eye(3)[:, :2]
        basis, kept = orthonormalize(M)
        assert kept == [0, 1]
        assert basis.shape == (3, 2)


def test_phase_fix_normalizes_column_phases():
    rng = np.random.default_rng(9)
    V = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))[0]
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 5))
    assert np.allclose(phase_fix(V * phases), phase_fix(V))
    fixed = phase_fix(V)
    for j in range(5):
        i = np.argmax(np.abs(fixed[:, j]))
        assert fixed[i, j].imag == pytest.approx(0.0, abs=1e-14)
        assert fixed[i, j].real > 0
