"""Exception hierarchy shared by all modules."""


class PeanoQuadError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(PeanoQuadError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(PeanoQuadError, ArithmeticError):
    """An interval operation left the domain of the function.

    ``node`` is the offending subexpression when the error was raised during
    expression evaluation, otherwise ``None``.
    """

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class EvaluationError(PeanoQuadError, ArithmeticError):
    """Real-valued evaluation of an expression failed."""


class ParseError(PeanoQuadError, ValueError):
    """Syntax error in an expression, with a 0-based character offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class CertificationError(PeanoQuadError):
    """No error bound could be certified (the enclosure of f'' failed)."""


class BudgetExhausted(PeanoQuadError):
    """The panel budget ran out before the tolerance was met.

    ``result`` holds the best certified result reached so far, or ``None``
    when nothing was computed.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
