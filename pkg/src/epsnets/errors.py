"""Shared exception types."""


class DegeneracyError(ValueError):
    """Input violates a general-position requirement of the operation."""


class VerificationError(RuntimeError):
    """A constructed net failed its own verification; this indicates a bug,
    not bad luck, since the construction is deterministic once seeded."""


class RetryLimitError(RuntimeError):
    """A randomized retry loop exhausted its attempt budget."""
