"""Exception types shared across the package."""


class SdsError(Exception):
    """Base class for all package errors."""


class TruncationError(SdsError):
    """State leaked into the guard band at the top of the Fock ladder."""


class DimensionMismatch(SdsError):
    """Operands live on different Hilbert spaces."""


class NonSymmetricWeights(SdsError):
    """Closed-form route requires |c_m| = |c_{-m}|."""


class UnsupportedParity(SdsError):
    """Requested protocol is only defined for one parity of N."""


class IllConditioned(SdsError):
    """A quotient of near-zero probabilities would dominate the result."""


class DegeneratePhase(SdsError):
    """Phase of a zero displacement is undefined."""


class NoFeasibleP(SdsError):
    """No repetition count in range reached the fidelity threshold."""

    def __init__(self, message, best_fidelity=None):
        super().__init__(message)
        self.best_fidelity = best_fidelity


class ToleranceNotMet(SdsError):
    """Integrator could not certify the requested accuracy."""


class SchemaMismatch(SdsError):
    """Dataset header does not carry the expected schema version."""
