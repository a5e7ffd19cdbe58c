"""Exception types raised across the package."""

import numpy as np


class ZeroVectorError(ValueError):
    """A row is too close to the origin to be projected onto the sphere."""

    def __init__(self, row):
        self.row = row
        super().__init__(f"row {row} has (near) zero norm and cannot be normalized")


class RankDeficientError(np.linalg.LinAlgError):
    """A basis or data matrix has numerical rank below the requested dimension."""


class InvalidDimError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


class InitializationError(RuntimeError):
    """Farthest-insertion seeding could not build a d-dimensional neighborhood."""


class InvalidParamsError(ValueError):
    pass


class NoInliersError(ValueError):
    pass


class EmptyTrialsError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DimMismatchError(ValueError):
    def __init__(self, line, expected, got):
        self.line = line
        super().__init__(f"line {line}: expected {expected} values, got {got}")
