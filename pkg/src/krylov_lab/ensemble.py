"""Random-matrix sampling and initial-state preparation.

The Gaussian unitary ensemble is sampled as H = (A + A^dag)/2 with
independent standard-normal real and imaginary parts in A, so diagonal
entries have variance 1 and off-diagonal entries variance 1/2 per
component (E|H_ij|^2 = 1 off the diagonal). For dimension N the spectrum
then concentrates on [-2 sqrt(N), 2 sqrt(N)].

Reproducibility contract: every sample is drawn from a fresh PCG64
generator keyed by ``SeedSequence(entropy=seed, spawn_key=key)``. Equal
(seed, key) pairs give bit-identical samples on a fixed NumPy build, and
distinct keys give statistically independent streams.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumWarning
from .linalg import hermitian_eigendecompose, phase_fix
from .validation import check_hermitian

DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters of a GUE draw.

    Attributes:
        dim: Matrix dimension, >= 2.
        seed: Master entropy for the generator stream.
        normalize_spectral_norm: Rescale the sample so its largest
            absolute eigenvalue is 1.
    """

    dim: int
    seed: int
    normalize_spectral_norm: bool = False

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 2:
            raise ValueError(f"dim must be an integer >= 2, got {self.dim!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for stream ``key`` under master ``seed``.

    This is the package-wide stream-splitting rule: independent draws
    (samples, trials, resample attempts) use distinct integer key tuples.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


def sample_gue(spec: EnsembleSpec, sample_index=0) -> np.ndarray:
    """Draw one GUE matrix.

    Args:
        spec: Ensemble parameters.
        sample_index: Stream key, an int or tuple of ints; distinct keys
            give independent samples under the same master seed.

    Returns:
        Hermitian (dim, dim) complex array. Exactly Hermitian by
        construction, so downstream Hermiticity checks pass at tolerance 0.
    """
    key = (sample_index,) if isinstance(sample_index, int) else tuple(sample_index)
    rng = spawn_rng(spec.seed, *key)
    n = spec.dim
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = (A + A.conj().T) / 2.0
    if spec.normalize_spectral_norm:
        w = np.linalg.eigvalsh(H)
        H = H / np.max(np.abs(w))
    return H


def uniform_eigenstate_superposition(H) -> np.ndarray:
    """Equal-weight superposition of all eigenstates of H.

    Returns (1/sqrt(N)) sum_n phi_n with eigenvector phases fixed so each
    phi_n has its largest-magnitude entry real positive. Warns when any
    eigenvalue gap drops below 1e-10, since near-degeneracy makes the
    eigenbasis, and hence this state, numerically ambiguous.
    """
    M = check_hermitian(H)
    es = hermitian_eigendecompose(M)
    gaps = np.diff(es.eigenvalues)
    if gaps.size and np.min(gaps) < DEGENERACY_TOL:
        warnings.warn(
            f"spectrum nearly degenerate: min gap {np.min(gaps):.3e}",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    V = phase_fix(es.eigenvectors)
    psi = V.sum(axis=1) / np.sqrt(M.shape[0])
    return psi / np.linalg.norm(psi)
