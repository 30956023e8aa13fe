from __future__ import annotations

from typing import Optional, Tuple


class ConfigurationError(ValueError):
    """
    Raised when a simulation configuration is rejected before any compute starts
    """


class NumericalError(ArithmeticError):
    """
    Base class for numerical failures raised while a simulation is running
    """


class SingularMatrixError(NumericalError):
    pass


class RankDeficiencyError(SingularMatrixError):
    def __init__(self, message: str, cell: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        # (subcarrier k, block m) of the first singular Gram matrix
        self.cell = cell


class SingularFilterError(NumericalError):
    pass
