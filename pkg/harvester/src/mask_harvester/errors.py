"""Harvester error types; both are fatal per the export contract."""


class HarvestError(Exception):
    """Base class for harvester failures."""


class ModelUnavailable(HarvestError):
    """A segmentation backend's model could not be loaded."""


class VideoDecodeError(HarvestError):
    """The input video could not be opened or decoded."""
