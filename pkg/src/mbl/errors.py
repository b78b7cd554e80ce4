"""Exception types raised across the package."""

from __future__ import annotations


class MblError(Exception):
    """Base class for all package errors."""


class DegenerateScalar(MblError, ZeroDivisionError):
    pass


class ShapeError(MblError, ValueError):
    pass


class SingularMatrix(MblError, ArithmeticError):
    """Elimination found no usable pivot.

    ``stage`` is the elimination column at which every candidate pivot vanished.
    """

    def __init__(self, stage: int, message: str | None = None):
        self.stage = stage
        super().__init__(message or f"singular matrix: no pivot at stage {stage}")


class ParameterDegenerate(MblError, ValueError):
    pass


class ParseError(MblError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class PearsonMismatch(MblError, ValueError):
    """Declared Pearson data does not annihilate the weight; ``residual`` holds the witness."""

    def __init__(self, message: str, residual=None):
        self.residual = residual
        super().__init__(message)


class RegularityFailure(MblError, ArithmeticError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"block-Hankel moment matrix is singular at degree {n}")


class TruncationTooShort(MblError, ValueError):
    pass


class OneSidedRequired(MblError, ValueError):
    pass


class NonAbelianInput(MblError, ValueError):
    pass
