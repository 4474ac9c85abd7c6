"""Exception hierarchy.

Input problems derive from ``InputError`` (CLI exit code 1); numerical
failures derive from ``NumericalError`` (CLI exit code 2).
"""


class InputError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


class DegenerateInputError(InputError):
    pass


class NotDecomposableError(InputError):
    pass


class EnumerationTooLargeError(InputError):
    pass


class PreconditionError(InputError):
    pass


class MalformedFileError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotPositiveDefiniteError(NumericalError):
    pass


class NotEstimableError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (last residual {residual:.3e})")
