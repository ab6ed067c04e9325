"""Exception types shared across the package."""


class AerotagError(Exception):
    """Base class for all aerotag errors."""


class DegenerateInput(AerotagError):
    """Input point has no defined answer (e.g. the exact Earth center)."""


class OutOfFrame(AerotagError):
    """Pixel coordinate lies outside the camera frame."""


class NoGroundIntersection(AerotagError):
    """Camera ray is level or climbing and never reaches the ground plane."""


class UnknownId(AerotagError):
    """Mutation references a POI id that is not in the store."""


class MalformedEvent(AerotagError):
    """POI event violates the event schema."""


class CorruptLog(AerotagError):
    """Event log has a non-monotone sequence or an unparseable line."""


class EmptyPath(AerotagError):
    """Flight path needs at least one waypoint."""


class TargetNeverVisible(AerotagError):
    """Accuracy target is not visible from any pose in the flight log."""


class EmptySamples(AerotagError):
    """Percentile of an empty sample list is undefined."""
