"""Estimator-style front end.

KrylovComplexity wraps basis construction plus amplitude evaluation in the
fit/transform idiom so the pipeline composes with scikit-learn tooling:
get_params/set_params work, clone() re-creates an unfitted copy, and
fitted state lives in trailing-underscore attributes.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .analysis import ProjectedMatrix, project_hamiltonian
from .dynamics import ROW_SUM_TOL
from .errors import BasisIncompleteError
from .krylov import build_basis
from .linalg import DEFAULT_DEFLATION_TOL, hermitian_eigendecompose
from .timescales import TimescaleReport, compute_timescales
from .validation import check_hermitian, check_state_vector


class KrylovComplexity(BaseEstimator):
    """Spread-complexity model for one (order, dt) generator cell.

    Parameters:
        order: Generator order, int >= 1 or math.inf.
        dt: Generator step; required positive for order >= 2.
        deflation_tol: Relative residual threshold for basis deflation.
        conjugate: Use the +i generator convention.

    Fitted attributes (set by fit):
        basis_: The constructed KrylovBasis.
        grade_: Number of basis vectors.
        eigensystem_: Spectral decomposition of H, reused by transform.
        hamiltonian_: Validated copy of H.
        psi0_: Validated copy of the initial state.
        lanczos_a_, lanczos_b_: Recurrence coefficients (order 1 only,
            otherwise None).

    Example:
        >>> model = KrylovComplexity(order=2, dt=0.1)
        >>> model.fit(H, psi0)
        >>> probs = model.transform([0.0, 0.5, 1.0])   # |kappa_n(t)|^2 rows
        >>> c = model.complexity([0.0, 0.5, 1.0])
    """

    def __init__(self, order=1, dt=None, deflation_tol=DEFAULT_DEFLATION_TOL,
                 conjugate=False):
        self.order = order
        self.dt = dt
        self.deflation_tol = deflation_tol
        self.conjugate = conjugate

    def fit(self, H, psi0):
        """Build the Krylov basis for H and psi0.

        Args:
            H: Hermitian matrix.
            psi0: Unit-norm initial state.

        Returns:
            self
        """
        M = check_hermitian(H)
        v = check_state_vector(psi0, dim=M.shape[0], name="psi0")
        basis = build_basis(M, self.order, self.dt, v,
                            deflation_tol=self.deflation_tol,
                            conjugate=self.conjugate)
        self.hamiltonian_ = M
        self.psi0_ = v
        self.basis_ = basis
        self.grade_ = basis.grade
        self.eigensystem_ = hermitian_eigendecompose(M)
        self.lanczos_a_ = None if basis.lanczos_a is None else basis.lanczos_a.copy()
        self.lanczos_b_ = None if basis.lanczos_b is None else basis.lanczos_b.copy()
        return self

    def transform(self, times) -> np.ndarray:
        """Squared basis amplitudes of the evolved state.

        Args:
            times: 1-D array-like of evaluation times.

        Returns:
            (len(times), grade_) array of |kappa_n(t)|^2.

        Raises:
            BasisIncompleteError: If any row sum strays from 1 by more
                than 1e-6.
        """
        check_is_fitted(self, "basis_")
        t = np.atleast_1d(np.asarray(times, dtype=np.float64))
        if t.ndim != 1:
            raise ValueError(f"times must be 1-D, got shape {t.shape}")
        es = self.eigensystem_
        c0 = es.eigenvectors.conj().T @ self.psi0_
        phases = np.exp(-1j * np.outer(es.eigenvalues, t))
        states = es.eigenvectors @ (phases * c0[:, None])
        amps = np.abs(self.basis_.vectors.conj().T @ states).T ** 2
        err = float(np.max(np.abs(amps.sum(axis=1) - 1.0)))
        if err > ROW_SUM_TOL:
            raise BasisIncompleteError(
                f"amplitude rows sum to 1 within {err:.3e} > {ROW_SUM_TOL:g}"
            )
        return amps

    def complexity(self, times) -> np.ndarray:
        """Spread complexity C(t) = sum_n n |kappa_n(t)|^2."""
        amps = self.transform(times)
        return amps @ np.arange(amps.shape[1], dtype=np.float64)

    def projected_hamiltonian(self, support_threshold: float | None = None) -> ProjectedMatrix:
        """H expressed in the fitted basis."""
        check_is_fitted(self, "basis_")
        if support_threshold is None:
            return project_hamiltonian(self.basis_, self.hamiltonian_)
        return project_hamiltonian(self.basis_, self.hamiltonian_,
                                   support_threshold=support_threshold)

    def timescale_report(self) -> TimescaleReport:
        """Characteristic timescales of the fitted system."""
        check_is_fitted(self, "basis_")
        return compute_timescales(self.hamiltonian_, self.grade_)
