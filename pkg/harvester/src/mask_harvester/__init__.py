"""Export labeled segmentation masks from videos in interchange format."""

__version__ = "0.1.0"

from .backends import ColorKeyBackend, Detection, GroundedSamBackend, make_segmenter
from .config import HarvestConfig
from .errors import HarvestError, ModelUnavailable, VideoDecodeError
from .harvest import harvest
from .rle import decode_mask, encode_mask
from .vos import FlowPropagator, prime_vos

__all__ = [
    "ColorKeyBackend",
    "Detection",
    "FlowPropagator",
    "GroundedSamBackend",
    "HarvestConfig",
    "HarvestError",
    "ModelUnavailable",
    "VideoDecodeError",
    "decode_mask",
    "encode_mask",
    "harvest",
    "make_segmenter",
    "prime_vos",
]
