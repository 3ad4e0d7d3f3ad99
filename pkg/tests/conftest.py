"""Shared test helpers."""

import numpy as np
import pytest


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    """Dense Hermitian matrix from a plain numpy stream.

    Independent of the package's ensemble conventions on purpose, so tests
    of linalg/timescales do not inherit assumptions from ensemble.
    """
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (A + A.conj().T) / 2.0


def random_state(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def pauli_x() -> np.ndarray:
    return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
