"""Exception hierarchy shared by every module of the package."""


class WeightedWordsError(Exception):
    """Base class for all errors raised by weightedwords."""


class ZeroValuation(WeightedWordsError, ValueError):
    """A geometric factor 1/(1 - w q^m) was requested with m <= 0."""


class DivergentProduct(WeightedWordsError, ValueError):
    """An infinite product whose factors do not tend to 1 in the q-adic sense."""


class NegativeExponent(WeightedWordsError, ValueError):
    """A substitution or power produced a negative power of q."""


class InsufficientTruncation(WeightedWordsError, ValueError):
    """The input series is not known to enough terms for the requested output."""


class NotAUnit(WeightedWordsError, ZeroDivisionError):
    """Division by a series whose constant term is not +1 or -1."""


class UnknownColor(WeightedWordsError, KeyError):
    pass


class UnresolvedSequenceTag(WeightedWordsError, KeyError):
    pass


class InexactDivision(WeightedWordsError, ArithmeticError):
    pass


class TruncationTooLow(WeightedWordsError, ArithmeticError):
    pass


class ConfigError(WeightedWordsError):
    pass


class NoWitnessForm(WeightedWordsError):
    pass


class UnknownIdentifier(WeightedWordsError, NameError):
    pass


class DSLSyntaxError(WeightedWordsError, SyntaxError):
    """Parse failure carrying a 1-based line/column and the expected tokens."""

    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail)


class DSLEvalError(WeightedWordsError):
    pass
