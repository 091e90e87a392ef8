"""Exception hierarchy shared by the library and the CLI.

The CLI maps each family onto an exit code: precondition failures exit 2,
numeric non-convergence exits 3, configuration and I/O problems exit 4.
"""


class FreesumError(Exception):
    """Base class for every error raised by freesum."""


class PreconditionError(FreesumError, ValueError):
    """An input violates a documented precondition or hypothesis."""


class ZeroScaleError(PreconditionError):
    pass


class DegreeTooLargeError(PreconditionError):
    pass


class ParameterError(PreconditionError):
    """A numeric parameter lies outside its admissible range."""


class GateError(PreconditionError):
    """A theorem precondition gate failed; ``violations`` names each inequality."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class InvertibilityError(PreconditionError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class InequalityViolation(FreesumError):
    """A deterministic operator inequality failed at matrix scale (CLI exit 1)."""


class ConvergenceError(FreesumError):
    """An iterative numeric procedure did not converge."""


class ZeroDenominatorError(ConvergenceError):
    """A Cauchy transform vanished on the subordination iteration path."""


class QuadratureError(ConvergenceError):
    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class EigenConvergenceError(ConvergenceError):
    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


class ConfigError(FreesumError):
    pass


class MeasureFormatError(ConfigError):
    pass
