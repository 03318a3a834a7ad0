"""Food volume under three shape hypotheses: prism, hemisphere, ellipsoid.

All three work from the food mask alone plus the frame's calibration, so
they adapt to portions that fill only part of the utensil. The prism and
hemisphere fits deliberately skip the bowl's hidden volume (their fitted
shapes already overestimate); the ellipsoid fit hugs the visible portion
tightly, so a fixed bowl-surplus volume is added back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .calibration import UtensilCalibration
from .errors import EmptyMask
from .keyframe import MeasurementCandidate
from .masks import InstanceMask, area_px, extents


class ShapeModel(Enum):
    PRISM = "prism"
    HEMISPHERE = "hemisphere"
    ELLIPSOID = "ellipsoid"


@dataclass(frozen=True)
class VolumeConstants:
    """Measured table-cutlery constants; override for non-standard utensils."""

    spoon_width_cm: float = 3.81
    bowl_surplus_cm3: float = 5.0
    max_plausible_cm3: float = 25.0

    def __post_init__(self) -> None:
        if min(self.spoon_width_cm, self.bowl_surplus_cm3, self.max_plausible_cm3) <= 0:
            raise ValueError("volume constants must all be positive")


@dataclass(frozen=True)
class VolumeEstimate:
    frame_index: int
    model: ShapeModel
    raw_cm3: Optional[float]
    plausible: bool

    def __post_init__(self) -> None:
        expected = self.raw_cm3 is not None and 0.0 < self.raw_cm3 < float("inf")
        # plausibility additionally requires the cap; validated by estimate_frame
        if self.plausible and not expected:
            raise ValueError("a plausible estimate must carry a positive raw volume")


def _metric_area_cm2(food: InstanceMask, cal: UtensilCalibration) -> float:
    area = area_px(food)
    if area == 0:
        raise EmptyMask(f"{food.label.value} mask has no foreground pixels")
    return area * cal.cm_per_px**2


def prism_volume(
    food: InstanceMask,
    cal: UtensilCalibration,
    constants: VolumeConstants = VolumeConstants(),
) -> float:
    """Metric mask area extruded across the spoon width."""
    return _metric_area_cm2(food, cal) * constants.spoon_width_cm


def hemisphere_volume(food: InstanceMask, cal: UtensilCalibration) -> float:
    """Hemisphere whose circular footprint has the mask's metric area.

    With footprint area A = pi r^2 the volume (2/3) pi r^3 equals
    (2/3) A^(3/2) / sqrt(pi).
    """
    r = math.sqrt(_metric_area_cm2(food, cal) / math.pi)
    return (2.0 / 3.0) * math.pi * r**3


def ellipsoid_volume(
    food: InstanceMask,
    cal: UtensilCalibration,
    constants: VolumeConstants = VolumeConstants(),
) -> float:
    """Ellipsoid spanned by the mask's bounding box plus the bowl surplus.

    The in-plane semi-axes come from the inclusive pixel extents (a 1-px
    mask still has nonzero axes); the out-of-plane semi-axis is half the
    spoon width, since the bowl bounds the food laterally.
    """
    min_x, max_x, min_y, max_y = extents(food)
    a = (max_x - min_x + 1) * cal.cm_per_px / 2.0
    b = (max_y - min_y + 1) * cal.cm_per_px / 2.0
    c = constants.spoon_width_cm / 2.0
    return (4.0 / 3.0) * math.pi * a * b * c + constants.bowl_surplus_cm3


def estimate_frame(
    candidate: MeasurementCandidate,
    cal: Optional[UtensilCalibration],
    model: ShapeModel,
    constants: VolumeConstants,
    frame_index: int,
) -> VolumeEstimate:
    """Dispatch to the chosen shape model and apply the plausibility cap.

    A frame whose calibration failed yields an estimate with no raw volume
    (and plausible=False) so downstream filtering sees it as a bad frame.
    """
    if cal is None:
        return VolumeEstimate(frame_index, model, None, False)
    if model is ShapeModel.PRISM:
        raw = prism_volume(candidate.food, cal, constants)
    elif model is ShapeModel.HEMISPHERE:
        raw = hemisphere_volume(candidate.food, cal)
    else:
        raw = ellipsoid_volume(candidate.food, cal, constants)
    plausible = 0.0 < raw < constants.max_plausible_cm3
    return VolumeEstimate(frame_index, model, raw, plausible)
