"""Exception hierarchy shared by all service layers."""


class RepositoryError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(RepositoryError):
    """Input violates a domain invariant (empty title, bad venue, ...)."""


class InvalidAddress(ValidationError):
    """Email address is not syntactically valid."""


class InvalidTransition(ValidationError):
    """Access-state change not allowed for the requesting actor."""


class NotFound(RepositoryError):
    """No record with the given identifier."""


class StorageError(RepositoryError):
    """The persistent store could not complete an append or read."""


class NotRequestable(RepositoryError):
    """Copy requests are only accepted for closed-access deposits."""


class AttestationRequired(RepositoryError):
    """The requester must attest to a permitted purpose before submitting."""


class UnknownToken(RepositoryError):
    """No decision token with the given value."""


class DecisionConflict(RepositoryError):
    """The requested action contradicts a decision already recorded."""


class TransportError(RepositoryError):
    """The mail transport failed to record the message; safe to retry."""


class InvalidPeriod(ValidationError):
    """Reporting period start is after its end."""
