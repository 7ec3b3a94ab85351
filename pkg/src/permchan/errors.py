"""Semantic exception hierarchy for the permchan package."""


class PermchanError(Exception):
    """Base error for this package."""


class InputError(PermchanError, ValueError):
    """Inputs violate a contract: domain, shape, or parameter errors."""


class SupportViolationError(InputError):
    """A log-likelihood term p(y) > 0 hit q(y) = 0."""


class SingularMatrixError(PermchanError):
    """Channel matrix is not (numerically) full-rank square."""


class ResourceLimitError(PermchanError):
    """An enumeration would exceed the configured size cap."""


class InfeasibleError(PermchanError):
    """A numeric target cannot be met (empty packing, quantile out of
    domain, zero variance, degenerate search)."""
