"""Exception and warning types raised by fairot."""


class FairOTError(Exception):
    """Base class for all fairot errors."""


class ValidationError(FairOTError, ValueError):
    """Input failed validation. The CLI maps these to exit code 2."""


class NumericalError(FairOTError, ArithmeticError):
    """A numerical procedure failed. The CLI maps these to exit code 3."""


class EmptySample(ValidationError):
    pass


class InvalidValue(ValidationError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DomainError(ValidationError):
    pass


class BinRangeError(ValidationError):
    pass


class EdgeMismatch(ValidationError):
    pass


class SupportError(ValidationError):
    """KL divergence is infinite: q has zero mass where p does not."""


class DimError(ValidationError):
    pass


class MatrixError(ValidationError):
    pass


class SingularSourceError(MatrixError):
    pass


class SizeError(ValidationError):
    pass


class UnknownGroupError(ValidationError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DegenerateGroupError(ValidationError):
    pass


class MissingOutcomeError(ValidationError):
    pass


class JoinError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConvergenceError(NumericalError):
    def __init__(self, message, residual, iterations):
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class NothingToMitigate(UserWarning):
    """Fewer than two groups: the fitted transform is the identity."""


class ClampWarning(UserWarning):
    """A rescaled score left [0, 1] and was clamped."""
