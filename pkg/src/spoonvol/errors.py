"""Exception types raised across the pipeline."""


class SpoonvolError(Exception):
    """Base class for all pipeline errors."""


class MalformedRle(SpoonvolError):
    """RLE payload does not describe a mask of the declared dimensions."""


class EmptyMask(SpoonvolError):
    """A geometry operation was asked to run on a mask with no foreground."""


class EmptyCurve(SpoonvolError):
    """Curve operation received zero points."""


class DegenerateCurve(SpoonvolError):
    """Curve is too short or not strictly increasing in x."""


class NoBendFound(SpoonvolError):
    """No point on the utensil top curve exceeds the bend-angle threshold."""


class NoActiveFrames(SpoonvolError):
    """Aggregation requested over a window with no frames."""


class MissingGroundTruth(SpoonvolError):
    """Evaluation input lacks a ground-truth volume for a video."""


class SceneOutOfBounds(SpoonvolError):
    """Synthetic scene geometry does not fit inside the image."""


class InterchangeError(SpoonvolError):
    """Interchange JSON document is malformed."""
