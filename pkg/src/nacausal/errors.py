"""Exception types raised across the package."""


class NaCausalError(Exception):
    """Base class for all errors raised by nacausal."""


class InvalidArgumentError(NaCausalError, ValueError):
    pass


class NotEnoughExtrema(NaCausalError):
    """Raised when a series has too few extrema to build envelopes.

    Inside the sifting loops this is a termination signal, not a failure.
    """


class UndefinedPhaseError(NaCausalError, ValueError):
    pass


class UndefinedRatioError(NaCausalError, ValueError):
    pass


class EmptyDecompositionError(NaCausalError, ValueError):
    pass


class DegenerateRemovalError(NaCausalError):
    pass


class ConditioningError(NaCausalError, ValueError):
    pass


class DivergenceError(NaCausalError, ArithmeticError):
    pass


class CsvParseError(NaCausalError, ValueError):
    pass
