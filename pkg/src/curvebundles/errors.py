"""Exception types shared across the toolkit."""


class CurveBundlesError(Exception):
    """Base class for all toolkit errors."""


class DegreeError(CurveBundlesError):
    """Inconsistent degree bookkeeping in form or graded-map data."""


class GradedSystemError(CurveBundlesError):
    """Malformed graded linear system (twist/degree data inconsistent)."""


class WindowBoundError(CurveBundlesError):
    """Internal consistency failure in a kernel scan; must be unreachable."""


class NotInjectiveError(CurveBundlesError):
    """Quotient requested of a map that is not generically injective."""


class FactorError(CurveBundlesError):
    """A map required to factor through a presentation does not."""


class GeometryError(CurveBundlesError):
    """Invalid geometric input (degenerate curve, wrong dimensions, ...)."""


class PreconditionError(CurveBundlesError):
    """A geometric precondition failed; diagnostics carried in args."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class InstanceError(CurveBundlesError):
    """Malformed instance file; `path` locates the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
