"""Exception hierarchy shared by all qdrin modules."""


class QdrinError(Exception):
    """Base class for every error raised by qdrin."""


class ValidationError(QdrinError, ValueError):
    """Malformed input (bad JSON descriptor, unknown command, ...)."""

    def __init__(self, message, step=None):
        self.step = step
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)


class CapExceeded(QdrinError):
    """A configured computational cap was hit."""


# --- finite fields and polynomials -------------------------------------------

class NonPrime(QdrinError, ValueError):
    pass


class FieldMismatch(QdrinError, TypeError):
    pass


class DivisionByZeroPoly(QdrinError, ZeroDivisionError):
    pass


class DivisionByZero(QdrinError, ZeroDivisionError):
    pass


# --- Drinfeld modules --------------------------------------------------------

class ZeroInput(QdrinError, ValueError):
    pass


class DegreeCapExceeded(CapExceeded):
    pass


class BadCharacteristic(QdrinError, ValueError):
    pass


class ModuleMismatch(QdrinError, ValueError):
    pass


# --- noncommutative tori, functor, quantum invariant -------------------------

class NotAModule(QdrinError, ValueError):
    pass


class ConstraintViolated(QdrinError, ValueError):
    def __init__(self, identity, message=None):
        self.identity = identity
        super().__init__(message or f"constraint {identity} violated")


class SingularDenominator(QdrinError, ZeroDivisionError):
    pass


class ZeroDenominator(QdrinError, ValueError):
    pass


class ConventionUnavailable(QdrinError, ValueError):
    pass


class EpsilonOutOfRange(QdrinError, ValueError):
    pass


class RankMismatch(QdrinError, ValueError):
    pass


class PrecisionTooLow(QdrinError, ValueError):
    pass


# --- quadratic orders --------------------------------------------------------

class BoundExceeded(CapExceeded):
    pass


class SearchExhausted(CapExceeded):
    def __init__(self, bound):
        self.bound = bound
        super().__init__(f"no solution found below bound {bound}")


class InvalidPair(QdrinError, ValueError):
    pass
