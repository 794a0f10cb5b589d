"""
Exception hierarchy for quadstat.

Input problems (bad files, invalid models, exceeded guards) and mathematical
outcomes are kept apart: the former map to exit code 2, while failed checks
are reported through CheckReport objects and never raised.
"""

from typing import Optional


class QuadstatError(Exception):
    """Base class for all quadstat errors."""

    exit_code = 2


class DimensionMismatchError(QuadstatError):
    """Operands live in ambient spaces of different dimension."""


class DimensionGuardError(QuadstatError):
    """An ambient dimension exceeds the configured guard."""

    def __init__(self, dim: int, limit: int, what: str = "ambient space"):
        super().__init__(f"{what} has dimension {dim}, above the guard of {limit} "
                         f"(raise it with --guard-dim or QUADSTAT_GUARD_DIM)")
        self.dim = dim
        self.limit = limit


class DegeneratePairingError(QuadstatError):
    """A pairing or Gram matrix is singular."""


class ModelValidationError(QuadstatError):
    """A statistics model violates its invariants."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class ModelFileError(QuadstatError):
    """A model file cannot be parsed."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class OrderIncompatibleError(QuadstatError):
    """The generator order cannot be used to triangularize the relations."""


class InsufficientCoefficientsError(QuadstatError):
    """Too few series coefficients for the requested fit degree."""


class LevelRangeError(QuadstatError):
    """An operator was requested outside the truncated level window."""


class MissingExchangeDataError(QuadstatError):
    """A bracket check needs exchange tensors that were not supplied."""


class ReplayError(QuadstatError):
    """A stored witness cannot be replayed."""
