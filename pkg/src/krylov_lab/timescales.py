"""Characteristic timescales of Hermitian evolution.

With h = ||H|| the spectral norm and m the Krylov grade:

    dt_scr  = 1 / h                scrambling step
    tau_scr = m / h                scrambling time
    s_mean  = (e_max - e_min) / N  mean level spacing
    tau_H   = 2 pi / s_mean        Heisenberg time

tau_scr is where the order-n Dyson term (h T)^n / n! stops shrinking with
n at n = m: the n = m - 1 and n = m terms are equal there, which is the
identity dyson_term_norm verifies.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError
from .linalg import hermitian_eigendecompose
from .validation import check_hermitian

IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class TimescaleReport:
    """Derived timescales for one Hamiltonian and grade."""

    h_norm: float
    grade: int
    tau_scr: float
    dt_scr: float
    mean_spacing: float
    tau_H: float

    def __post_init__(self):
        if self.h_norm <= 0 or self.mean_spacing <= 0:
            raise ValueError("h_norm and mean_spacing must be positive")
        if not isinstance(self.grade, int) or self.grade < 1:
            raise ValueError(f"grade must be a positive integer, got {self.grade!r}")
        checks = (
            (self.tau_scr, self.grade / self.h_norm),
            (self.dt_scr, 1.0 / self.h_norm),
            (self.tau_H, 2.0 * math.pi / self.mean_spacing),
        )
        for got, want in checks:
            if abs(got - want) > IDENTITY_TOL * abs(want):
                raise ValueError(f"inconsistent report: {got!r} != {want!r}")


def dyson_term_norm(H, T: float, n: int) -> float:
    """Norm of the order-n Dyson series term, ||(H T)^n|| / n! = (h T)^n / n!.

    Evaluated in the log domain so large n neither overflows nor loses
    precision.
    """
    if n < 0 or not isinstance(n, int):
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    M = check_hermitian(H)
    if n == 0:
        return 1.0
    h = float(np.max(np.abs(np.linalg.eigvalsh(M))))
    x = h * T
    if x == 0.0:
        return 0.0
    return math.exp(n * math.log(x) - math.lgamma(n + 1))


def compute_timescales(H, grade: int) -> TimescaleReport:
    """Compute all characteristic timescales.

    Args:
        H: Hermitian matrix.
        grade: Krylov grade of the initial state under H.

    Returns:
        TimescaleReport.

    Raises:
        DegenerateSpectrumError: If the spectrum has zero width, so the
            mean level spacing and Heisenberg time are undefined.
    """
    M = check_hermitian(H)
    if not isinstance(grade, int) or grade < 1 or grade > M.shape[0]:
        raise ValueError(f"grade must be an integer in [1, {M.shape[0]}], got {grade!r}")
    es = hermitian_eigendecompose(M)
    h = float(np.max(np.abs(es.eigenvalues)))
    if h == 0.0:
        raise DegenerateSpectrumError("H = 0 has no timescales")
    spread = float(es.eigenvalues[-1] - es.eigenvalues[0])
    mean_spacing = spread / M.shape[0]
    if mean_spacing <= 0.0:
        raise DegenerateSpectrumError(
            f"spectrum width {spread:.3e} gives no mean level spacing"
        )
    return TimescaleReport(
        h_norm=h,
        grade=grade,
        tau_scr=grade / h,
        dt_scr=1.0 / h,
        mean_spacing=mean_spacing,
        tau_H=2.0 * math.pi / mean_spacing,
    )
