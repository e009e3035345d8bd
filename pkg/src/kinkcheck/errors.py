"""Exception hierarchy shared by all kinkcheck modules."""


class KinkcheckError(Exception):
    """Base class for every error raised by this package."""


class ParseError(KinkcheckError, ValueError):
    """Malformed problem file.

    ``line`` and ``col`` are 1-based; either may be ``None`` when the error
    is not tied to a position (e.g. a missing section).
    """

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


class TriangularityError(ParseError):
    """A switching definition references ``abs(z_j)`` with ``j >= i``."""


class DimensionError(ParseError):
    """An index lies outside the declared dimensions."""


class UnknownIdentifierError(ParseError):
    """An identifier in an expression is not a known variable or function."""


class EvaluationError(KinkcheckError, ArithmeticError):
    """Expression evaluated at a singular point (division by zero, log <= 0)."""


class InfeasiblePointError(KinkcheckError, ValueError):
    """The queried point violates the constraints beyond the tolerance policy."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class ComplementarityError(InfeasiblePointError):
    """A (u, v) pair violates complementarity beyond ``eps_act**2``."""


class SimplexError(KinkcheckError, RuntimeError):
    """The dense simplex hit its iteration cap."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}
