"""Exception types shared across the package."""


class QudecayError(Exception):
    """Base class for all package-specific errors."""


class RegimeError(QudecayError):
    """Configuration lies outside the validity regime of the model."""


class NumericalFailure(QudecayError):
    """A numerical scheme failed to converge, or the integrator aborted."""


class InvariantBreach(QudecayError):
    """A physical invariant (trace, Hermiticity, positivity, |sz| bound)
    drifted beyond its tolerance during a run."""


class ResourceLimit(QudecayError):
    """A configured size or memory cap would be exceeded."""
