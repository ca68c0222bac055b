"""Exception hierarchy shared by every module."""


class DegoneError(Exception):
    """Base class for all errors raised by this package.

    ``exit_code`` is what the command line returns: 1 verification failure,
    2 bad input, 3 numeric trouble.
    """

    exit_code = 1


class ParseError(DegoneError, ValueError):
    exit_code = 2

    def __init__(self, message, text=None, pos=None):
        self.text = text
        self.pos = pos
        if text is not None and pos is not None:
            message = f"{message} at position {pos}\n  {text}\n  {' ' * pos}^"
        super().__init__(message)


class NotMonic(DegoneError, ValueError):
    exit_code = 2


class NotIrreducible(DegoneError, ValueError):
    exit_code = 2


class ZeroElement(DegoneError, ZeroDivisionError):
    exit_code = 2


class PrecisionExhausted(DegoneError, ArithmeticError):
    exit_code = 3


class IndexDivisor(DegoneError, ArithmeticError):
    """Dedekind's criterion fails: p divides [O_k : Z[theta]]."""

    exit_code = 3

    def __init__(self, p, poly=None):
        self.p = p
        msg = f"p = {p} divides the index of Z[theta]"
        if poly is not None:
            msg += f" for defining polynomial {poly}"
        super().__init__(msg)


class NegativeExponentOutsideS(DegoneError, ValueError):
    pass


class NotAnSUnit(DegoneError, ValueError):
    exit_code = 2


class OnDivisor(DegoneError, ValueError):
    exit_code = 2


class NotOnCurve(DegoneError, ValueError):
    exit_code = 2


class EqualPoints(DegoneError, ValueError):
    exit_code = 2


class OnSupport(DegoneError, ValueError):
    exit_code = 2


class TorsionPoint(DegoneError, ValueError):
    exit_code = 2


class BudgetExceeded(DegoneError, ArithmeticError):
    exit_code = 3
