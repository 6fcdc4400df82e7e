"""
Errors raised by the planning pipeline.

Commands map ``MapError`` to a validation failure (exit code 2) and
``GeometryError`` / ``InfeasibleSpacingError`` to planning infeasibility
(exit code 3).
"""


class RiverCoverError(Exception):
    """Base class for every error raised by the rivers app."""


class MapError(RiverCoverError):
    """The map document is unreadable or violates the map invariants."""


class GeometryError(RiverCoverError):
    """Contours, openings or directions cannot be derived from the map."""


class InfeasibleSpacingError(RiverCoverError):
    """
    The spacing does not fit two lanes somewhere along the river.

    ``arcs`` holds the offending (start, end) centerline ranges in meters.
    """

    def __init__(self, message, arcs=()):
        super().__init__(message)
        self.arcs = tuple(arcs)


class SimulationError(RiverCoverError):
    """The traversal simulation cannot be evaluated."""


class BathymetryError(RiverCoverError):
    """The depth model cannot be fitted or evaluated."""


class MissionFormatError(RiverCoverError):
    """A mission document cannot be written or parsed."""
