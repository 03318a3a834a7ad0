"""Metric food-volume estimation on utensils from segmentation-mask streams."""

__version__ = "0.1.0"

from .calibration import UtensilCalibration, UtensilKind, calibrate
from .errors import SpoonvolError
from .filtering import FilterState, FilteredSeries, evaluate, filter_step, run_filter
from .keyframe import KeyframeDecision, MeasurementCandidate, decide
from .masks import (
    FrameObservation,
    InstanceMask,
    Label,
    PixelPoint,
    area_px,
    centroid,
    extents,
    mask_from_grid,
    rle_decode,
    rle_encode,
    top_curve,
)
from .pipeline import PipelineConfig, estimate_video
from .synth import SceneSpec, reference_suite, render_video
from .volume import (
    ShapeModel,
    VolumeConstants,
    VolumeEstimate,
    ellipsoid_volume,
    estimate_frame,
    hemisphere_volume,
    prism_volume,
)

__all__ = [
    "FilterState",
    "FilteredSeries",
    "FrameObservation",
    "InstanceMask",
    "KeyframeDecision",
    "Label",
    "MeasurementCandidate",
    "PipelineConfig",
    "PixelPoint",
    "SceneSpec",
    "ShapeModel",
    "SpoonvolError",
    "UtensilCalibration",
    "UtensilKind",
    "VolumeConstants",
    "VolumeEstimate",
    "area_px",
    "calibrate",
    "centroid",
    "decide",
    "ellipsoid_volume",
    "estimate_frame",
    "estimate_video",
    "evaluate",
    "extents",
    "filter_step",
    "hemisphere_volume",
    "mask_from_grid",
    "prism_volume",
    "reference_suite",
    "render_video",
    "rle_decode",
    "rle_encode",
    "run_filter",
    "top_curve",
]
