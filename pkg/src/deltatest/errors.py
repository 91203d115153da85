"""Exception hierarchy. Everything derives from ``ValueError`` so callers
that only care about bad input can catch that."""


class DeltaTestError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidKError(DeltaTestError):
    """Batch size outside the range allowed for the operation."""


class DegenerateScaleError(DeltaTestError):
    """A scale (standard deviation, variance) is zero or negative."""


class InvalidAlternativeError(DeltaTestError):
    """The alternative carries no mean shift."""


class NoSolutionError(DeltaTestError):
    """Search for a batch size failed to reach the target power."""


class ParseError(DeltaTestError):
    """Malformed input data."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(DeltaTestError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
