"""Exception hierarchy shared by all modules."""


class SbvpError(Exception):
    """Base class for every error raised by this package."""


class InvalidMeshError(SbvpError, ValueError):
    pass


class DomainError(SbvpError, ValueError):
    pass


class IncompatibleGridError(SbvpError, ValueError):
    pass


class ProblemSpecError(SbvpError, ValueError):
    pass


class InvalidInputError(SbvpError, ValueError):
    pass


class BesselRangeError(SbvpError, OverflowError):
    pass


class ZeroNotFoundError(SbvpError, RuntimeError):
    pass


class UnsupportedAlphaError(SbvpError, ValueError):
    pass


class DegenerateLambdaError(SbvpError, ValueError):
    pass


class KernelError(SbvpError):
    """Raised when a Green's kernel cannot be built for the requested parameters."""


class ResonantLambdaError(KernelError, ValueError):
    pass


class HypothesisViolationError(KernelError, ValueError):
    pass


class IntegrationError(SbvpError, RuntimeError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class EvaluationError(SbvpError, ArithmeticError):
    pass


class MonotonicityBreachError(SbvpError, RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class EnclosureViolationError(SbvpError, RuntimeError):
    pass


class DivergenceError(SbvpError, RuntimeError):
    pass


class LinearAlgebraError(SbvpError, RuntimeError):
    pass


class ExprSyntaxError(SbvpError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(SbvpError, ValueError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class ExprEvalError(SbvpError, ArithmeticError):
    """Evaluation of a parsed expression left its domain; ``tag`` names the cause."""

    def __init__(self, tag, message=None):
        super().__init__(message or tag)
        self.tag = tag


class ConfigError(SbvpError, ValueError):
    pass


class OrderValidationError(SbvpError, ValueError):
    """An initial iterate fails its upper/lower-solution inequalities."""
