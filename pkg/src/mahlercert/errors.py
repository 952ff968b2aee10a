"""Error taxonomy.

Every error raised by the library carries a stable, machine-readable ``code``
which the CLI reports verbatim.  The full list lives in ``ERROR_CODES``.
"""


class MahlerError(Exception):
    code = "MAHLER_ERROR"


class ZeroInput(MahlerError, ValueError):
    code = "ZERO_INPUT"


class InvalidArgument(MahlerError, ValueError):
    code = "INVALID_ARGUMENT"


class UnsupportedLambda(MahlerError, ValueError):
    code = "UNSUPPORTED_LAMBDA"


class PoleStructureError(MahlerError, ValueError):
    code = "POLE_STRUCTURE"


class SingularSystem(MahlerError, ValueError):
    code = "SINGULAR_SYSTEM"


class ShapeMismatch(MahlerError, ValueError):
    code = "SHAPE_MISMATCH"


class InsufficientPrecision(MahlerError, ValueError):
    code = "INSUFFICIENT_PRECISION"


class InternalInconsistency(MahlerError, RuntimeError):
    code = "INTERNAL_INCONSISTENCY"


class AssumptionMissing(MahlerError, ValueError):
    code = "ASSUMPTION_MISSING"


class RadixMismatch(MahlerError, ValueError):
    code = "RADIX_MISMATCH"


class InvalidEquation(MahlerError, ValueError):
    code = "INVALID_EQUATION"


class ExprSyntaxError(MahlerError, ValueError):
    """Parse failure with a 1-based position and the set of tokens that would
    have been accepted there."""

    code = "SYNTAX_ERROR"

    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class DivisionByZero(MahlerError, ZeroDivisionError):
    code = "DIVISION_BY_ZERO"


class NonRectangularMatrix(MahlerError, ValueError):
    code = "NON_RECTANGULAR_MATRIX"


class SeriesFormatError(MahlerError, ValueError):
    code = "SERIES_FORMAT"


ERROR_CODES = {
    cls.code: cls
    for cls in (
        ZeroInput,
        InvalidArgument,
        UnsupportedLambda,
        PoleStructureError,
        SingularSystem,
        ShapeMismatch,
        InsufficientPrecision,
        InternalInconsistency,
        AssumptionMissing,
        RadixMismatch,
        InvalidEquation,
        ExprSyntaxError,
        DivisionByZero,
        NonRectangularMatrix,
        SeriesFormatError,
    )
}
