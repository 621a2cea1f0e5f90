"""Exception hierarchy shared by every module."""


class GerbeError(Exception):
    """Base class for all errors raised by gerbecalc."""


class InvalidSimplex(GerbeError):
    pass


class InvalidParameter(GerbeError):
    pass


class NotASimplex(GerbeError):
    pass


class DimensionError(GerbeError):
    pass


class InvalidDegree(GerbeError):
    pass


class NotClosed(GerbeError):
    pass


class IncomparableClasses(GerbeError):
    pass


class BaseMismatch(GerbeError):
    pass


class InvalidMap(GerbeError):
    pass


class NotACocycle(GerbeError):
    """A cocycle relation fails; ``relation`` and ``simplex`` locate the failure."""

    def __init__(self, message, simplex=None, relation=None):
        super().__init__(message)
        self.simplex = simplex
        self.relation = relation


class NotAConnection(GerbeError):
    pass


class NonzeroClass(GerbeError):
    """Raised when a trivialization is requested for data with a nonzero class.

    ``cls`` carries the obstruction (a cohomology class when one is available)
    and ``reason`` says which stage of the construction failed.
    """

    def __init__(self, cls=None, reason="dixmier-douady", detail=None):
        msg = f"nonzero class ({reason})"
        if cls is not None:
            msg += f": {cls}"
        if detail:
            msg += f"; {detail}"
        super().__init__(msg)
        self.cls = cls
        self.reason = reason
        self.detail = detail


class AxiomError(GerbeError):
    """A group, extension or bundle axiom fails."""

    def __init__(self, axiom, detail=""):
        super().__init__(f"{axiom}: {detail}" if detail else axiom)
        self.axiom = axiom


class CocycleViolation(AxiomError):
    pass


class FormatError(GerbeError):
    """Malformed JSON input; ``key`` names the offending entry."""

    def __init__(self, key, detail=""):
        super().__init__(f"bad input at {key!r}" + (f": {detail}" if detail else ""))
        self.key = key
