class CeilingExceeded(ValueError):
    """Raised when an input exceeds a configured size ceiling of an exhaustive routine."""


class HypothesisFailure(RuntimeError):
    """An arithmetic certificate did not hold; carries the offending item."""

    def __init__(self, message, item=None):
        super().__init__(message)
        self.item = item
