"""Exception types shared across the package."""


class WalkError(Exception):
    """Base class for all errors raised by nuwalk."""


class DimensionError(WalkError):
    """Array length or matrix shape does not match the lattice."""


class SolverError(WalkError):
    """Eigensolver failed or produced residuals above the gate.

    Carries enough context to reproduce the failing instance.
    """

    def __init__(self, message, seed_info=None):
        super().__init__(message)
        self.seed_info = seed_info


class SingularSpectrumError(WalkError):
    """A zero eigenvalue makes the quasi-energy map ill-defined."""


class UnsupportedCaseError(WalkError):
    """Requested a configuration the model excludes (e.g. case B phase maps)."""


class VerificationError(WalkError):
    """A verification gate residual exceeded its tolerance."""
