"""Exception types shared across the package."""


class EgueError(Exception):
    """Base class for all package errors."""


class NegativeUpperIndex(EgueError, ValueError):
    pass


class ArgumentOutOfRange(EgueError, ValueError):
    pass


class CorrelationOutOfRange(EgueError, ValueError):
    pass


class InvalidGrid(EgueError, ValueError):
    pass


class DimensionTooLarge(EgueError, ValueError):
    pass


class ShapeMismatch(EgueError, ValueError):
    pass


class UnknownTable(EgueError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class DegenerateScenario(EgueError, ValueError):
    """Raised when cumulants are requested for a scenario whose moments all vanish."""
