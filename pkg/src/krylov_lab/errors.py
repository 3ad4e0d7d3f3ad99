"""Exception and warning types shared across the package."""


class KrylovLabError(Exception):
    """Base class for all krylov-lab errors."""


class ConfigError(KrylovLabError):
    """Invalid experiment configuration: unknown key, bad value, or missing file."""


class NumericError(KrylovLabError):
    """A numerical contract was violated during computation."""


class EigensolverError(NumericError):
    """The Hermitian eigensolver failed to converge."""


class BasisIncompleteError(NumericError):
    """Amplitude rows do not sum to one: the basis misses reachable directions."""


class StepSizeError(NumericError):
    """Integrator norm drift exceeded tolerance; a smaller step is required."""


class DegenerateSpectrumError(NumericError):
    """Mean level spacing vanished; the Heisenberg time is undefined."""


class EmptyMaskError(NumericError):
    """No matrix entry exceeds the support threshold."""


class DegenerateSpectrumWarning(UserWarning):
    """Eigenvalue gaps below tolerance make phase conventions ambiguous."""
