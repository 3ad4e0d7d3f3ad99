"""Input validation helpers.

Every public entry point funnels array-like inputs through these checkers,
which coerce to complex ndarrays and enforce the structural contracts
(squareness, Hermiticity, unit norm) before any numerics run.
"""

import math

import numpy as np

HERMITIAN_TOL = 1e-12
UNIT_NORM_TOL = 1e-12


def check_square(A, name: str = "A") -> np.ndarray:
    """Coerce to a 2-D complex array and require it to be square."""
    M = np.ascontiguousarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(M.view(np.float64))):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def check_hermitian(A, name: str = "H", tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a Hermitian matrix.

    The deviation max|A - A^dag| must not exceed ``tol * max|A|``. The zero
    matrix passes trivially.

    Args:
        A: Array-like, square.
        name: Label used in error messages.
        tol: Relative Hermiticity tolerance.

    Returns:
        The matrix as a contiguous complex128 array.

    Raises:
        ValueError: If the matrix is not square or not Hermitian at ``tol``.
    """
    M = check_square(A, name=name)
    scale = np.max(np.abs(M))
    dev = np.max(np.abs(M - M.conj().T))
    if dev > tol * scale:
        raise ValueError(
            f"{name} is not Hermitian: max|A - A^dag| = {dev:.3e} "
            f"exceeds {tol:g} * max|A| = {tol * scale:.3e}"
        )
    return M


def check_state_vector(psi, dim: int | None = None, name: str = "psi",
                       tol: float = UNIT_NORM_TOL) -> np.ndarray:
    """Validate a unit-norm state vector.

    Args:
        psi: Array-like, 1-D.
        dim: Required length, if known.
        name: Label used in error messages.
        tol: Allowed deviation of |<psi|psi> - 1|.

    Returns:
        The state as a contiguous complex128 array.

    Raises:
        ValueError: On wrong shape, non-finite entries, or norm deviation.
    """
    v = np.ascontiguousarray(psi, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"{name} must have length {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v.view(np.float64))):
        raise ValueError(f"{name} contains non-finite entries")
    sq = float(np.real(np.vdot(v, v)))
    if abs(sq - 1.0) > tol:
        raise ValueError(f"{name} is not unit norm: |<v|v> - 1| = {abs(sq - 1.0):.3e}")
    return v


def check_generator_order(order) -> int | float:
    """Normalize a generator order.

    Accepted forms: a positive integer p >= 1 for the truncated series, or
    ``math.inf`` (also the strings "inf"/"infinite") for the exact
    unitary-step generator.
    """
    if isinstance(order, str):
        if order.strip().lower() in ("inf", "infinite", "infinity"):
            return math.inf
        raise ValueError(f"unrecognized generator order {order!r}")
    if isinstance(order, float):
        if math.isinf(order) and order > 0:
            return math.inf
        if order.is_integer() and order >= 1:
            return int(order)
        raise ValueError(f"generator order must be an integer >= 1 or inf, got {order!r}")
    if isinstance(order, (int, np.integer)) and not isinstance(order, bool):
        if order >= 1:
            return int(order)
        raise ValueError(f"generator order must be >= 1, got {order}")
    raise ValueError(f"unrecognized generator order {order!r}")


def order_token(order) -> str:
    """Short file-name token for an order: ``p1``, ``p2``, ..., ``pinf``."""
    order = check_generator_order(order)
    return "pinf" if math.isinf(order) else f"p{order}"
