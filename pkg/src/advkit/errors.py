"""Exception types shared across the engine."""


class AdvkitError(Exception):
    """Base class for all engine errors."""


class ValidationError(AdvkitError):
    """Input data violates a documented invariant."""


class FormatError(AdvkitError):
    """A file or byte stream does not conform to its declared format."""
