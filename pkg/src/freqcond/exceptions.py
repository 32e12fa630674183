"""Exception hierarchy shared by every module of the package."""


class FreqCondError(Exception):
    """Base class for all domain errors raised by freqcond."""


class InvalidInputError(FreqCondError, ValueError):
    """Malformed or out-of-range input (bad labels, empty events, bad JSON)."""


class PreconditionError(FreqCondError, ValueError):
    """Input is well formed but violates an operation's precondition."""


class DegenerateModelError(FreqCondError, ValueError):
    """The Markov model lacks a unique stationary distribution."""


class NullConditioningError(FreqCondError, ValueError):
    """Conditioning on an event of probability zero."""


class UndefinedRatioError(FreqCondError, ZeroDivisionError):
    """A count ratio has a zero denominator."""


class ResourceLimitError(FreqCondError, RuntimeError):
    """A brute-force enumeration exceeded its configured cap."""


class ConsistencyError(FreqCondError, AssertionError):
    """Two exact computations that must agree did not.

    This signals a bug, never bad input.
    """
