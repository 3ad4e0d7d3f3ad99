"""Time evolution, basis amplitudes, and spread complexity.

Evolution is spectral: psi(t) = V exp(-i Lambda t) V^dag psi0, evaluated
for a whole time grid at once. The spread complexity of a trace is
C(t) = sum_n n |kappa_n(t)|^2 with kappa_n(t) = <b_n|psi(t)>.

An independent route to the same amplitudes exists for order 1: the
tridiagonal chain ODE

    dk_n/dt = -i a_n k_n - i b_n k_(n-1) - i b_(n+1) k_(n+1)

integrated with classical RK4. The two routes agreeing pointwise is a
strong end-to-end check, since they share no code beyond the Lanczos
coefficients.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BasisIncompleteError, StepSizeError
from .krylov import KrylovBasis
from .linalg import hermitian_eigendecompose
from .validation import check_hermitian, check_state_vector

ROW_SUM_TOL = 1e-6
NORM_DRIFT_TOL = 1e-6
BASE_STEP = 1e-3


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid [start, stop] with a fixed point count."""

    start: float
    stop: float
    points: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("grid endpoints must be finite")
        if self.start < 0:
            raise ValueError(f"grid start must be >= 0, got {self.start}")
        if self.stop <= self.start:
            raise ValueError(f"grid stop must exceed start, got [{self.start}, {self.stop}]")
        if not isinstance(self.points, int) or self.points < 2:
            raise ValueError(f"grid needs an integer points >= 2, got {self.points!r}")

    def times(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    @property
    def spacing(self) -> float:
        return (self.stop - self.start) / (self.points - 1)


@dataclass(frozen=True)
class ComplexityTrace:
    """Squared amplitudes and spread complexity over a time grid.

    Attributes:
        grid: The evaluation grid.
        amplitudes_sq: (points, grade) array of |kappa_n(t)|^2.
        complexity: (points,) array, complexity[i] = sum_n n * amplitudes_sq[i, n].
        order: Generator order the basis was built for.
        dt: Generator step (0.0 where not meaningful, e.g. ODE traces).
    """

    grid: TimeGrid
    amplitudes_sq: np.ndarray
    order: int | float
    dt: float
    complexity: np.ndarray = field(init=False)

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes_sq, dtype=np.float64)
        if amps.ndim != 2 or amps.shape[0] != self.grid.points:
            raise ValueError(f"amplitudes shape {amps.shape} does not match grid ({self.grid.points} points)")
        if np.min(amps) < -1e-12:
            raise ValueError(f"negative squared amplitude {np.min(amps):.3e}")
        object.__setattr__(self, "amplitudes_sq", amps)
        weights = np.arange(amps.shape[1], dtype=np.float64)
        object.__setattr__(self, "complexity", amps @ weights)

    @property
    def grade(self) -> int:
        return self.amplitudes_sq.shape[1]

    def row_sum_error(self) -> float:
        """Largest deviation of any amplitude row sum from 1."""
        return float(np.max(np.abs(self.amplitudes_sq.sum(axis=1) - 1.0)))


def evolve(H, psi0, t: float) -> np.ndarray:
    """Evolve psi0 to time t under H via the spectral decomposition."""
    M = check_hermitian(H)
    v = check_state_vector(psi0, dim=M.shape[0], name="psi0")
    if t == 0.0:
        return v.copy()
    es = hermitian_eigendecompose(M)
    c0 = es.eigenvectors.conj().T @ v
    return es.eigenvectors @ (np.exp(-1j * es.eigenvalues * float(t)) * c0)


def amplitudes(basis: KrylovBasis, H, psi0, grid: TimeGrid) -> ComplexityTrace:
    """Project the exact evolution of psi0 onto a Krylov basis.

    Args:
        basis: Basis to project onto.
        H: Hermitian evolution Hamiltonian (not the generator; evolution is
            always exp(-i H t) regardless of the basis order).
        psi0: Unit-norm initial state.
        grid: Evaluation grid.

    Returns:
        ComplexityTrace with one amplitude row per grid time.

    Raises:
        BasisIncompleteError: If any row sum deviates from 1 by more than
            1e-6, meaning the evolved state leaves the basis span.
    """
    M = check_hermitian(H)
    v = check_state_vector(psi0, dim=M.shape[0], name="psi0")
    if basis.dim != M.shape[0]:
        raise ValueError(f"basis dim {basis.dim} does not match H dim {M.shape[0]}")
    es = hermitian_eigendecompose(M)
    c0 = es.eigenvectors.conj().T @ v
    times = grid.times()
    # states[:, i] = psi(times[i]); phases shaped (dim, points)
    phases = np.exp(-1j * np.outer(es.eigenvalues, times))
    states = es.eigenvectors @ (phases * c0[:, None])
    kappa = basis.vectors.conj().T @ states
    amps = np.abs(kappa.T) ** 2
    trace = ComplexityTrace(grid=grid, amplitudes_sq=amps, order=basis.order, dt=basis.dt)
    err = trace.row_sum_error()
    if err > ROW_SUM_TOL:
        raise BasisIncompleteError(
            f"amplitude rows sum to 1 within {err:.3e} > {ROW_SUM_TOL:g}; "
            f"grade {basis.grade} basis does not contain the evolved state"
        )
    return trace


def chain_ode_integrate(a, b, grid: TimeGrid) -> ComplexityTrace:
    """Integrate the order-1 amplitude chain ODE with classical RK4.

    The state starts as kappa = (1, 0, ..., 0) at t = 0 and evolves under
    the tridiagonal matrix built from the Lanczos coefficients. The fixed
    step is min(grid spacing, 1e-3 / max(|a|_inf, |b|_inf, 1)), shrunk per
    interval so steps land exactly on grid points.

    Args:
        a: Real diagonal coefficients, length m.
        b: Positive off-diagonal coefficients, length m - 1.
        grid: Evaluation grid; must start at 0.

    Returns:
        ComplexityTrace with order 1 and dt 0.0.

    Raises:
        StepSizeError: If the integrated norm drifts from 1 by more than 1e-6.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.size < 1 or b.shape != (a.size - 1,):
        raise ValueError(f"need len(b) == len(a) - 1, got {a.shape} and {b.shape}")
    if grid.start != 0.0:
        raise ValueError(f"chain ODE integration must start at t = 0, got {grid.start}")
    m = a.size
    T = np.zeros((m, m), dtype=np.complex128)
    T[np.arange(m), np.arange(m)] = a
    if m > 1:
        T[np.arange(m - 1), np.arange(1, m)] = b
        T[np.arange(1, m), np.arange(m - 1)] = b
    A = -1j * T

    scale = max(float(np.max(np.abs(a))) if a.size else 0.0,
                float(np.max(np.abs(b))) if b.size else 0.0, 1.0)
    h_cap = min(grid.spacing, BASE_STEP / scale)
    nsub = max(1, math.ceil(grid.spacing / h_cap))
    h = grid.spacing / nsub

    kappa = np.zeros(m, dtype=np.complex128)
    kappa[0] = 1.0
    rows = np.empty((grid.points, m), dtype=np.float64)
    rows[0] = np.abs(kappa) ** 2
    for i in range(1, grid.points):
        for _ in range(nsub):
            k1 = A @ kappa
            k2 = A @ (kappa + 0.5 * h * k1)
            k3 = A @ (kappa + 0.5 * h * k2)
            k4 = A @ (kappa + h * k3)
            kappa = kappa + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rows[i] = np.abs(kappa) ** 2

    drift = float(np.max(np.abs(rows.sum(axis=1) - 1.0)))
    if drift > NORM_DRIFT_TOL:
        raise StepSizeError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL:g}; "
            f"retry with a finer grid (effective step was {h:.3e})"
        )
    return ComplexityTrace(grid=grid, amplitudes_sq=rows, order=1, dt=0.0)


def complexity_difference(trace_p: ComplexityTrace, trace_1: ComplexityTrace) -> np.ndarray:
    """Pointwise C_p(t) - C_1(t) for traces on the same grid."""
    if trace_p.grid != trace_1.grid:
        raise ValueError(f"grids differ: {trace_p.grid} vs {trace_1.grid}")
    return trace_p.complexity - trace_1.complexity
