"""Exception hierarchy shared by every chasekit module."""


class ChasekitError(Exception):
    """Base class for all errors raised by chasekit."""


class UnboundVariable(ChasekitError):
    pass


class ArityMismatch(ChasekitError):
    pass


class NotASubcontext(ChasekitError):
    pass


class NotRegular(ChasekitError):
    pass


class NotHorn(ChasekitError):
    pass


class NotRelational(ChasekitError):
    pass


class NotFunctional(ChasekitError):
    pass


class NotAnEStructure(ChasekitError):
    pass


class NotNormal(ChasekitError):
    pass


class PreconditionViolation(ChasekitError):
    pass


class NotSatisfiedAtAnyLevel(ChasekitError):
    pass


class TraceExhausted(ChasekitError):
    pass


class NotSatisfied(ChasekitError):
    pass


class ConstantInTheory(ChasekitError):
    pass


class IllFormedDerivation(ChasekitError):
    pass


class CheckFailed(ChasekitError):
    pass


class ParseError(ChasekitError):
    """Raised by the text front end; carries a source location."""

    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        loc = ""
        if source is not None:
            loc += f"{source}:"
        if line is not None:
            loc += f"{line}:"
            if column is not None:
                loc += f"{column}:"
        super().__init__(f"{loc} {message}" if loc else message)


class UnknownSymbol(ChasekitError):
    pass


class ProofSearchFailed(ChasekitError):
    """The bounded prover found no derivation within its fuel."""
