"""Evolution generators and Krylov basis construction.

A generator of order p and step dt is the truncated series

    G(p, dt) = sum_{k=1}^{p} (-i dt)^(k-1) H^k / k!

whose p -> infinity limit is U(dt) = exp(-i H dt) (the series converges to
(exp(-i H dt) - 1) * i / dt, which generates the same Krylov subspaces as
U itself; the infinite order therefore uses U directly). Order p = 1 is
plain H, and its Krylov basis is the Lanczos basis with real recurrence
coefficients a_n, b_n.

Basis construction is iterative: the generator is applied to the newest
basis vector and the result is orthogonalized against all survivors
(modified Gram-Schmidt plus one full reorthogonalization pass). This spans
the same nested subspaces as orthonormalizing explicit generator powers
but avoids the catastrophic cancellation that makes the explicit-power
ladder deflate spuriously once the powers align with the dominant
eigenvector; with the recurrence, full grade is reached whenever the
subspace genuinely has it.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_DEFLATION_TOL, matrix_function
from .validation import (
    check_generator_order,
    check_hermitian,
    check_square,
    check_state_vector,
)

ORTHONORMALITY_TOL = 1e-10
MAX_CANDIDATE_SLACK = 2


@dataclass(frozen=True)
class KrylovBasis:
    """Orthonormal Krylov basis for one (order, dt) cell.

    Attributes:
        order: Generator order (int >= 1 or math.inf).
        dt: Generator step. Recorded as 0.0 when order is 1 and no step
            was supplied, since the order-1 generator does not use it.
        vectors: (dim, grade) array with orthonormal columns; column 0 is
            the initial state exactly as passed in.
        grade: Number of basis vectors, <= dim.
        deflation_tol: Relative residual threshold used during construction.
        lanczos_a: Real diagonal recurrence coefficients, order 1 only.
        lanczos_b: Positive off-diagonal coefficients, length grade - 1,
            order 1 only.
    """

    order: int | float
    dt: float
    vectors: np.ndarray
    grade: int
    deflation_tol: float = DEFAULT_DEFLATION_TOL
    lanczos_a: np.ndarray | None = field(default=None)
    lanczos_b: np.ndarray | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "order", check_generator_order(self.order))
        V = np.ascontiguousarray(self.vectors, dtype=np.complex128)
        dim, grade = V.shape
        if grade != self.grade:
            raise ValueError(f"grade {self.grade} does not match vectors shape {V.shape}")
        if grade < 1 or grade > dim:
            raise ValueError(f"grade must be in [1, dim], got {grade} with dim {dim}")
        gram_dev = np.max(np.abs(V.conj().T @ V - np.eye(grade)))
        if gram_dev > ORTHONORMALITY_TOL:
            raise ValueError(f"basis not orthonormal: deviation {gram_dev:.3e}")
        object.__setattr__(self, "vectors", V)
        if self.order == 1:
            if self.lanczos_a is None or self.lanczos_b is None:
                raise ValueError("order-1 basis requires lanczos coefficients")
            a = np.asarray(self.lanczos_a, dtype=np.float64)
            b = np.asarray(self.lanczos_b, dtype=np.float64)
            if a.shape != (grade,) or b.shape != (grade - 1,):
                raise ValueError("lanczos coefficients must have lengths grade and grade - 1")
            if b.size and np.min(b) <= self.deflation_tol:
                raise ValueError(f"off-diagonal coefficient {np.min(b):.3e} below deflation tolerance")
            object.__setattr__(self, "lanczos_a", a)
            object.__setattr__(self, "lanczos_b", b)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


def build_generator(H, order, dt: float | None = None, conjugate: bool = False) -> np.ndarray:
    """Construct the evolution generator G(order, dt).

    Args:
        H: Hermitian matrix.
        order: int >= 1 or math.inf.
        dt: Step size, required positive for order >= 2. Ignored for
            order 1, where the generator is H itself.
        conjugate: Use +i in place of -i throughout (the conjugate series
            and exp(+i H dt)). For order >= 2 the two conventions span
            different Krylov subspaces in general.

    Returns:
        Complex (n, n) array. Hermitian only for order 1.
    """
    M = check_hermitian(H)
    order = check_generator_order(order)
    if order == 1:
        return M
    if dt is None or not (dt > 0) or not math.isfinite(dt):
        raise ValueError(f"order {order} requires a positive finite dt, got {dt!r}")
    sign = 1j if conjugate else -1j
    if math.isinf(order):
        return matrix_function(M, lambda w: np.exp(sign * dt * w))
    G = np.zeros_like(M)
    Hk = np.eye(M.shape[0], dtype=np.complex128)
    coeff = 1.0 + 0.0j
    for k in range(1, order + 1):
        # coeff = (sign*dt)^(k-1) / k!
        Hk = Hk @ M
        G = G + coeff * Hk
        coeff *= sign * dt / (k + 1)
    return G


def krylov_sequence(G, psi0, max_len: int) -> np.ndarray:
    """Normalized generator-power rays G^k psi0 / ||G^k psi0||.

    Args:
        G: Square matrix (need not be Hermitian).
        psi0: Unit-norm initial state.
        max_len: Number of rays requested (k = 0 .. max_len - 1).

    Returns:
        (dim, m) array with m <= max_len; truncates with a warning if a
        power annihilates the state.
    """
    M = check_square(G, name="G")
    v = check_state_vector(psi0, dim=M.shape[0], name="psi0")
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    rays = [v]
    for _ in range(1, max_len):
        w = M @ rays[-1]
        nv = np.linalg.norm(w)
        if nv == 0.0:
            warnings.warn(
                f"generator annihilated the state; sequence truncated at length {len(rays)}",
                stacklevel=2,
            )
            break
        rays.append(w / nv)
    return np.column_stack(rays)


def _lanczos(H: np.ndarray, psi0: np.ndarray, tol: float):
    """Three-term recurrence with full reorthogonalization at every step."""
    dim = H.shape[0]
    basis = [psi0]
    a: list[float] = []
    b: list[float] = []
    n = 0
    while n < len(basis):
        w = H @ basis[n]
        scale = np.linalg.norm(w)
        a.append(float(np.real(np.vdot(basis[n], w))))
        w = w - a[n] * basis[n]
        if n > 0:
            w = w - b[n - 1] * basis[n - 1]
        for _ in range(2):
            for q in basis:
                w -= np.vdot(q, w) * q
        r = np.linalg.norm(w)
        if scale == 0.0 or r < tol * scale or len(basis) == dim:
            break
        b.append(float(r))
        basis.append(w / r)
        n += 1
    return np.column_stack(basis), np.asarray(a), np.asarray(b)


def _iterate_basis(G: np.ndarray, psi0: np.ndarray, tol: float):
    """Grow an orthonormal basis by repeated application of G."""
    dim = G.shape[0]
    basis = [psi0]
    while len(basis) < dim + MAX_CANDIDATE_SLACK:
        w = G @ basis[-1]
        scale = np.linalg.norm(w)
        if scale == 0.0:
            break
        for _ in range(2):
            for q in basis:
                w -= np.vdot(q, w) * q
        r = np.linalg.norm(w)
        if r < tol * scale or len(basis) == dim:
            break
        basis.append(w / r)
    return np.column_stack(basis)


def build_basis(H, order, dt: float | None, psi0,
                deflation_tol: float = DEFAULT_DEFLATION_TOL,
                conjugate: bool = False) -> KrylovBasis:
    """Build the Krylov basis of G(order, dt) from an initial state.

    For order 1 this runs the Lanczos recurrence and records the tridiagonal
    coefficients; otherwise the generic iteration applies G to the newest
    basis vector and orthogonalizes. Construction stops at the first
    candidate whose orthogonal residual falls below ``deflation_tol`` times
    the candidate norm, or at grade dim.

    Args:
        H: Hermitian matrix.
        order: Generator order (int >= 1 or math.inf).
        dt: Generator step; required positive for order >= 2.
        psi0: Unit-norm initial state.
        deflation_tol: Relative residual threshold.
        conjugate: Build from the +i generator convention.

    Returns:
        KrylovBasis whose first column is psi0 exactly.
    """
    M = check_hermitian(H)
    order = check_generator_order(order)
    v = check_state_vector(psi0, dim=M.shape[0], name="psi0")
    if not (0 < deflation_tol < 1):
        raise ValueError(f"deflation_tol must be in (0, 1), got {deflation_tol!r}")
    if order == 1:
        vectors, a, b = _lanczos(M, v, deflation_tol)
        return KrylovBasis(order=1, dt=0.0 if dt is None else float(dt),
                           vectors=vectors, grade=vectors.shape[1],
                           deflation_tol=deflation_tol, lanczos_a=a, lanczos_b=b)
    if dt is None:
        raise ValueError(f"order {order} requires a positive finite dt, got None")
    dt_value = float(dt)
    G = build_generator(M, order, dt_value, conjugate=conjugate)
    vectors = _iterate_basis(G, v, deflation_tol)
    return KrylovBasis(order=order, dt=dt_value, vectors=vectors,
                       grade=vectors.shape[1], deflation_tol=deflation_tol)


def lanczos_coefficients(basis: KrylovBasis) -> tuple[np.ndarray, np.ndarray]:
    """Return (a, b) from an order-1 basis.

    Raises:
        ValueError: If the basis was built for order != 1.
    """
    if basis.order != 1:
        raise ValueError(f"lanczos coefficients exist only for order 1, got {basis.order}")
    return basis.lanczos_a.copy(), basis.lanczos_b.copy()
