"""
Exception hierarchy for lepoly.

Every error carries the exit code of its family so entry points can map
failures without inspecting messages.
"""

from typing import Any, Optional


class LepolyError(Exception):
    """Base class for all lepoly failures."""

    exit_code = 5


class AlgebraError(LepolyError):
    """Invalid input to an exact polynomial operation."""


class RootFindingError(LepolyError):
    """Univariate root finder did not converge."""


class PolyParseError(LepolyError):
    """Syntax or grammar error in polynomial text."""

    exit_code = 1

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class ConfigError(LepolyError):
    exit_code = 1


class HypothesisError(LepolyError):
    """The germ violates a hypothesis the construction relies on."""

    exit_code = 2

    def __init__(self, message: str, report: Optional[Any] = None):
        self.report = report
        super().__init__(message)


class GermError(LepolyError):
    """Precondition failure in germ analysis (non-reduced, non-coprime input)."""

    exit_code = 2


class PuiseuxError(LepolyError):
    exit_code = 3


class GeometryError(LepolyError):
    exit_code = 3


class BranchPointSearchError(GeometryError):
    pass


class GeometrySelectionError(GeometryError):
    pass


class NonGenericProjectionError(GeometryError):
    """Two special points share the same y for every t; retrying cannot separate them."""


class TrackingError(LepolyError):
    exit_code = 4


class DegreeDropError(TrackingError):
    """Leading coefficient fell below tolerance."""


class EscapeRegionError(TrackingError):
    """Fibre requested where g(y) vanishes within tolerance."""


class StepUnderflowError(TrackingError):
    def __init__(self, message: str, location: complex):
        self.location = location
        super().__init__(f"{message} near y={location:.6g}")


class SheetCollisionError(TrackingError):
    def __init__(self, message: str, location: complex):
        self.location = location
        super().__init__(f"{message} near y={location:.6g}")


class PolyhedronError(LepolyError):
    exit_code = 5


class ConsistencyError(LepolyError):
    exit_code = 5


class OracleError(LepolyError):
    exit_code = 5
