"""Exceptions and warnings shared across MLSpin packages."""

from __future__ import annotations


class MLSpinError(Exception):
    """Base class for all MLSpin errors."""


class GridMismatchError(MLSpinError, ValueError):
    """Two fields living on different grids were combined."""

    def __init__(self, message: str = "grid mismatch"):
        super().__init__(message)


class ChargeSupportError(MLSpinError, ValueError):
    """The charge support does not fit in the periodic box."""

    def __init__(self, message: str = "charge support exceeds box margin"):
        super().__init__(message)


class RotationError(MLSpinError, ValueError):
    """A matrix is not an admissible rotation."""


class BlowUpError(MLSpinError, FloatingPointError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, t: float | None = None, message: str = "blow-up detected: reduce dt"):
        self.t = t
        if t is not None:
            message = f"{message} (t = {t:.6g})"
        super().__init__(message)


class ConfigError(MLSpinError, ValueError):
    """Invalid configuration file; `line` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message)

    def __str__(self) -> str:
        base = super().__str__()
        return f"line {self.line}: {base}" if self.line is not None else base


class SeamWarning(UserWarning):
    """Field or charge content reaches the wrap seam of the periodic box."""
