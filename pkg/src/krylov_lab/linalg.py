"""Hermitian spectral calculus and orthonormalization.

Eigendecompositions back everything downstream: generator construction,
time evolution, and spectral norms. Orthonormalization uses modified
Gram-Schmidt with one full reorthogonalization pass, which keeps the loss
of orthogonality at the 1e-15 level even for nearly dependent inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EigensolverError
from .validation import check_hermitian, check_square

DEFAULT_DEFLATION_TOL = 1e-8
UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class Eigensystem:
    """Spectral decomposition of a Hermitian matrix.

    Attributes:
        eigenvalues: Real eigenvalues in ascending order, shape (n,).
        eigenvectors: Unitary matrix whose columns are the matching
            eigenvectors, shape (n, n).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=np.float64)
        V = np.asarray(self.eigenvectors, dtype=np.complex128)
        if w.ndim != 1 or V.ndim != 2 or V.shape != (w.size, w.size):
            raise ValueError(f"inconsistent shapes {w.shape} and {V.shape}")
        if np.any(np.diff(w) < 0):
            raise ValueError("eigenvalues must be ascending")
        gram_dev = np.max(np.abs(V.conj().T @ V - np.eye(w.size)))
        if gram_dev > UNITARITY_TOL:
            raise ValueError(f"eigenvector matrix not unitary: deviation {gram_dev:.3e}")
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", V)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


def hermitian_eigendecompose(H) -> Eigensystem:
    """Eigendecompose a Hermitian matrix.

    Args:
        H: Square Hermitian array-like.

    Returns:
        Eigensystem with ascending eigenvalues.

    Raises:
        ValueError: If H is not square or not Hermitian.
        EigensolverError: If the solver fails to converge.
    """
    M = check_hermitian(H)
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigendecomposition failed: {exc}") from exc
    return Eigensystem(eigenvalues=w, eigenvectors=V)


def spectral_norm(H) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    M = check_hermitian(H)
    w = np.linalg.eigvalsh(M)
    return float(np.max(np.abs(w)))


def matrix_function(H, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Args:
        H: Square Hermitian array-like.
        f: Callable mapping a real ndarray of eigenvalues to values
            (may be complex), applied elementwise.

    Returns:
        V f(Lambda) V^dag as a complex (n, n) array.
    """
    es = hermitian_eigendecompose(H)
    fw = np.asarray(f(es.eigenvalues), dtype=np.complex128)
    if fw.shape != es.eigenvalues.shape:
        raise ValueError("f must map the eigenvalue array elementwise")
    return (es.eigenvectors * fw) @ es.eigenvectors.conj().T


def phase_fix(V) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive.

    Ties resolve to the first occurrence (lowest row index), which makes the
    convention deterministic for a fixed input.
    """
    V = np.ascontiguousarray(V, dtype=np.complex128)
    out = V.copy()
    for j in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, j])))
        z = V[i, j]
        if z != 0:
            out[:, j] *= np.conj(z) / abs(z)
    return out


def orthonormalize(vectors, deflation_tol: float = DEFAULT_DEFLATION_TOL):
    """Orthonormalize vectors by modified Gram-Schmidt with reorthogonalization.

    Vectors are processed in order. Each candidate is orthogonalized against
    the survivors twice (MGS plus one full reorthogonalization pass) and
    dropped when its residual norm falls below ``deflation_tol`` times its
    original norm, or when it is exactly zero.

    Args:
        vectors: Either a 2-D array whose columns are the vectors, or a
            sequence of 1-D arrays of equal length.
        deflation_tol: Relative residual threshold for dropping a candidate.

    Returns:
        Tuple ``(basis, kept)`` where basis is a (dim, k) array with
        orthonormal columns and kept lists the surviving input indices.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = np.ascontiguousarray(vectors, dtype=np.complex128)
    else:
        seq = [np.ascontiguousarray(v, dtype=np.complex128) for v in vectors]
        if not seq:
            raise ValueError("no vectors given")
        cols = np.column_stack(seq)
    if cols.shape[1] == 0:
        raise ValueError("no vectors given")

    basis: list[np.ndarray] = []
    kept: list[int] = []
    for j in range(cols.shape[1]):
        w = cols[:, j].copy()
        scale = np.linalg.norm(w)
        if scale == 0.0:
            continue
        for _ in range(2):
            for q in basis:
                w -= np.vdot(q, w) * q
        r = np.linalg.norm(w)
        if r < deflation_tol * scale:
            continue
        basis.append(w / r)
        kept.append(j)
    if not basis:
        raise ValueError("all vectors deflated; nothing to orthonormalize")
    return np.column_stack(basis), kept
