"""Deterministic synthetic mask-stream generator with exact ground truth.

Scenes contain a side-view spoon silhouette (flat-topped bowl plus a
handle rising at the neck angle), a food blob resting on the bowl, and a
face disk. The food blob is sized inversely from the requested shape
model, so rendering an "ellipsoid" scene produces a mask on which the
ellipsoid estimator is analytically exact; the same holds for the prism
and hemisphere generators. That isolates pipeline error (calibration,
rasterization, filtering) from model-mismatch error.

The spoon's bowl is always a standard 6 cm bowl, so the scene's metric
scale is pinned by construction: cm_per_px = 6.0 / bowl_length_px.

All randomness (corruption placement and which frames are corrupted)
comes from numpy PCG64 generators seeded per frame with
SeedSequence([seed, frame_index]), so corrupting one frame can never
change the bytes of another and identical seeds reproduce identical
documents on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .calibration import UtensilKind
from .errors import SceneOutOfBounds
from .masks import FrameObservation, InstanceMask, Label, mask_from_grid
from .interchange import document_to_json
from .volume import ShapeModel, VolumeConstants

SPOON_CONFIDENCE = 0.95
FOOD_CONFIDENCE = 0.90
FACE_CONFIDENCE = 0.92
CORRUPT_CONFIDENCE = 0.70


@dataclass(frozen=True)
class SpoonSpec:
    """Side-view spoon geometry, all in pixels."""

    bowl_length_px: float = 120.0
    bowl_depth_px: float = 24.0
    handle_length_px: float = 80.0
    handle_thickness_px: int = 7
    bend_angle_deg: float = 30.0
    tip_x_start: float = 24.0
    tip_x_end: float = 44.0
    lifted_bowl_top_y: float = 120.0
    rest_bowl_top_y: float = 206.0


@dataclass(frozen=True)
class FoodSpec:
    shape: ShapeModel = ShapeModel.ELLIPSOID
    true_volume_cm3: float = 13.0
    aspect: float = 1.6  # in-plane width/height ratio of the ellipsoid blob


@dataclass(frozen=True)
class FaceSpec:
    center_x: float = 150.0
    center_y: float = 40.0
    radius_px: float = 18.0


@dataclass(frozen=True)
class CorruptionSpec:
    """Per-frame failure-injection rates; mutually exclusive per frame."""

    spurious_rate: float = 0.0
    giant_mask_rate: float = 0.0
    dropout_rate: float = 0.0

    def __post_init__(self) -> None:
        rates = (self.spurious_rate, self.giant_mask_rate, self.dropout_rate)
        if any(not 0.0 <= r <= 1.0 for r in rates):
            raise ValueError(f"corruption rates must lie in [0, 1], got {rates}")
        if sum(rates) > 1.0:
            raise ValueError(f"corruption rates sum to {sum(rates)} > 1")


@dataclass(frozen=True)
class SceneSpec:
    seed: int = 0
    frame_count: int = 300
    fps: float = 30.0
    width: int = 320
    height: int = 240
    spoon: SpoonSpec = field(default_factory=SpoonSpec)
    food: FoodSpec = field(default_factory=FoodSpec)
    face: FaceSpec = field(default_factory=FaceSpec)
    corruption: CorruptionSpec = field(default_factory=CorruptionSpec)
    # fraction of the video during which the utensil is lifted near the face
    active_start: float = 0.2
    active_end: float = 0.8

    @property
    def cm_per_px(self) -> float:
        return UtensilKind.SPOON.reference_length_cm / self.spoon.bowl_length_px

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.frame_count < 1:
            raise ValueError("frame_count must be >= 1")
        if self.food.true_volume_cm3 <= 0:
            raise ValueError("true_volume_cm3 must be > 0")
        if not 0.0 <= self.active_start <= self.active_end <= 1.0:
            raise ValueError("active window fractions must satisfy 0 <= start <= end <= 1")
        _validate_bounds(self)


@dataclass(frozen=True)
class FrameTruth:
    frame_index: int
    true_cm_per_px: float
    true_bend_x: Optional[float]
    keyframe_should_be_active: bool


@dataclass(frozen=True)
class GroundTruth:
    true_volume_cm3: float
    frames: tuple[FrameTruth, ...]


def _validate_bounds(spec: SceneSpec) -> None:
    s = spec.spoon
    rise = s.handle_length_px * math.tan(math.radians(s.bend_angle_deg))
    for tip_x in (s.tip_x_start, s.tip_x_end):
        right = tip_x + s.bowl_length_px + s.handle_length_px
        if tip_x < 0 or right >= spec.width:
            raise SceneOutOfBounds(
                f"spoon spans x [{tip_x}, {right:.1f}] outside image width {spec.width}"
            )
    for top_y in (s.lifted_bowl_top_y, s.rest_bowl_top_y):
        if top_y - rise < 0 or top_y + s.bowl_depth_px >= spec.height:
            raise SceneOutOfBounds(
                f"spoon spans y [{top_y - rise:.1f}, {top_y + s.bowl_depth_px:.1f}] "
                f"outside image height {spec.height}"
            )
    f = spec.face
    if not (0 <= f.center_x - f.radius_px and f.center_x + f.radius_px < spec.width):
        raise SceneOutOfBounds("face disk outside image width")
    if not (0 <= f.center_y - f.radius_px and f.center_y + f.radius_px < spec.height):
        raise SceneOutOfBounds("face disk outside image height")
    half_w, half_h = _food_half_extents_px(spec)
    if 2 * half_w >= s.bowl_length_px * 1.6:
        raise SceneOutOfBounds(
            f"food blob width {2 * half_w:.0f}px too large for a "
            f"{s.bowl_length_px:.0f}px bowl"
        )
    if s.lifted_bowl_top_y - 2 * half_h < 0:
        raise SceneOutOfBounds("food blob rises above the image when lifted")


def _food_half_extents_px(spec: SceneSpec) -> tuple[float, float]:
    """In-plane semi-extents (px) of the food blob for the requested truth."""
    volume = spec.food.true_volume_cm3
    s = spec.cm_per_px
    constants = VolumeConstants()
    if spec.food.shape is ShapeModel.PRISM:
        area_cm2 = volume / constants.spoon_width_cm
        r_cm = math.sqrt(area_cm2 / math.pi)
        return r_cm / s, r_cm / s
    if spec.food.shape is ShapeModel.HEMISPHERE:
        r_cm = (volume / ((2.0 / 3.0) * math.pi)) ** (1.0 / 3.0)
        return r_cm / s, r_cm / s
    body = volume - constants.bowl_surplus_cm3
    if body <= 0:
        raise ValueError(
            f"ellipsoid truth {volume} cm^3 does not exceed the "
            f"{constants.bowl_surplus_cm3} cm^3 bowl surplus"
        )
    c = constants.spoon_width_cm / 2.0
    ab = body / ((4.0 / 3.0) * math.pi * c)  # product of in-plane semi-axes, cm^2
    b_cm = math.sqrt(ab / spec.food.aspect)
    a_cm = spec.food.aspect * b_cm
    return a_cm / s, b_cm / s


def _axes(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    # 1-D coordinate vectors shaped for broadcasting into (height, width)
    return np.arange(width)[None, :], np.arange(height)[:, None]


def disk_grid(width: int, height: int, cx: float, cy: float, r: float) -> np.ndarray:
    xs, ys = _axes(width, height)
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= r**2


def ellipse_grid(
    width: int, height: int, cx: float, cy: float, a: float, b: float
) -> np.ndarray:
    xs, ys = _axes(width, height)
    return ((xs - cx) / a) ** 2 + ((ys - cy) / b) ** 2 <= 1.0


def spoon_grid(
    width: int,
    height: int,
    tip_x: float,
    bowl_top_y: float,
    spoon: SpoonSpec,
) -> tuple[np.ndarray, float]:
    """Rasterize the spoon silhouette; returns (grid, bend_x).

    The bowl is the lower half of an ellipse under a perfectly flat top
    line, so the top curve is flat from the tip to the neck and then rises
    at exactly bend_angle_deg along the handle. The returned bend_x is the
    geometric bowl/handle junction.
    """
    xs, ys = _axes(width, height)
    half = spoon.bowl_length_px / 2.0
    cx = tip_x + half
    inside_x = np.abs(xs - cx) <= half  # (1, W)
    rel = np.where(inside_x, (xs - cx) / half, 1.0)
    depth = spoon.bowl_depth_px * np.sqrt(np.maximum(0.0, 1.0 - rel**2))
    bowl = inside_x & (ys >= bowl_top_y) & (ys <= bowl_top_y + depth)

    bend_x = tip_x + spoon.bowl_length_px
    slope = math.tan(math.radians(spoon.bend_angle_deg))
    along = xs - bend_x
    handle_top = np.round(bowl_top_y - slope * along)
    handle = (
        (along >= 0)
        & (along <= spoon.handle_length_px)
        & (ys >= handle_top)
        & (ys < handle_top + spoon.handle_thickness_px)
    )
    return bowl | handle, bend_x


def _frame_rng(seed: int, frame_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, frame_index])))


def _lerp(a: float, b: float, t: float) -> float:
    return a + (b - a) * t


def render_frame(
    spec: SceneSpec, frame_index: int
) -> tuple[FrameObservation, FrameTruth]:
    """Render one frame and its ground truth (corruption already applied)."""
    n = spec.frame_count
    t = frame_index / (n - 1) if n > 1 else 0.0
    in_window = spec.active_start <= t <= spec.active_end
    tip_x = _lerp(spec.spoon.tip_x_start, spec.spoon.tip_x_end, t)
    bowl_top_y = (
        spec.spoon.lifted_bowl_top_y if in_window else spec.spoon.rest_bowl_top_y
    )

    spoon, bend_x = spoon_grid(spec.width, spec.height, tip_x, bowl_top_y, spec.spoon)
    half_w, half_h = _food_half_extents_px(spec)
    food_cx = tip_x + spec.spoon.bowl_length_px / 2.0
    food_cy = bowl_top_y - half_h + 1.0  # resting on the flat bowl top
    if spec.food.shape is ShapeModel.ELLIPSOID:
        food = ellipse_grid(spec.width, spec.height, food_cx, food_cy, half_w, half_h)
    else:
        food = disk_grid(spec.width, spec.height, food_cx, food_cy, half_w)
    face = disk_grid(
        spec.width, spec.height, spec.face.center_x, spec.face.center_y, spec.face.radius_px
    )

    rng = _frame_rng(spec.seed, frame_index)
    u = rng.random()
    c = spec.corruption
    dropped: Optional[str] = None
    food_confidence = FOOD_CONFIDENCE
    if u < c.dropout_rate:
        dropped = ["food", "food", "spoon", "face"][int(rng.integers(0, 4))]
    elif u < c.dropout_rate + c.spurious_rate:
        # misclassified off-utensil object: a big blob kept fully inside the
        # image so its volume always blows past the plausibility cap
        r = 55.0 + 15.0 * rng.random()
        cx = (r + 2.0) + (spec.width - 2.0 * r - 4.0) * rng.random()
        cy = (r + 2.0) + (spec.height - 2.0 * r - 4.0) * rng.random()
        food = disk_grid(spec.width, spec.height, cx, cy, r)
        food_confidence = CORRUPT_CONFIDENCE
    elif u < c.dropout_rate + c.spurious_rate + c.giant_mask_rate:
        # runaway segmentation covering most of the image
        x0 = int(spec.width * 0.05 * rng.random())
        y0 = int(spec.height * 0.05 * rng.random())
        food = np.zeros((spec.height, spec.width), dtype=bool)
        food[y0 : y0 + int(0.8 * spec.height), x0 : x0 + int(0.8 * spec.width)] = True
        food_confidence = CORRUPT_CONFIDENCE

    instances = []
    if dropped != "spoon":
        instances.append(mask_from_grid(spoon, Label.SPOON, SPOON_CONFIDENCE))
    if dropped != "food":
        instances.append(mask_from_grid(food, Label.FOOD, food_confidence))
    if dropped != "face":
        instances.append(mask_from_grid(face, Label.FACE, FACE_CONFIDENCE))

    frame = FrameObservation(
        frame_index=frame_index,
        timestamp_s=frame_index / spec.fps,
        image_width=spec.width,
        image_height=spec.height,
        instances=tuple(instances),
    )
    truth = FrameTruth(
        frame_index=frame_index,
        true_cm_per_px=spec.cm_per_px,
        true_bend_x=None if dropped == "spoon" else bend_x,
        keyframe_should_be_active=in_window and dropped is None,
    )
    return frame, truth


def render_video(spec: SceneSpec) -> tuple[dict[str, Any], GroundTruth]:
    """Render a whole scene into an interchange document plus ground truth."""
    frames = []
    truths = []
    for i in range(spec.frame_count):
        frame, truth = render_frame(spec, i)
        frames.append(frame)
        truths.append(truth)
    document = document_to_json(spec.fps, frames)
    return document, GroundTruth(
        true_volume_cm3=spec.food.true_volume_cm3, frames=tuple(truths)
    )


def ground_truth_to_json(truth: GroundTruth) -> dict[str, Any]:
    return {
        "true_volume_cm3": truth.true_volume_cm3,
        "frames": [
            {
                "frame_index": f.frame_index,
                "true_cm_per_px": f.true_cm_per_px,
                "true_bend_x": f.true_bend_x,
                "keyframe_should_be_active": f.keyframe_should_be_active,
            }
            for f in truth.frames
        ],
    }


def reference_suite() -> dict[str, SceneSpec]:
    """Ten fixed benchmark scenes: 8-12 s at 30 fps, truths spread over
    10-17 cm^3, shape models cycled, and two fully clean videos."""
    shapes = (ShapeModel.PRISM, ShapeModel.HEMISPHERE, ShapeModel.ELLIPSOID)
    corruptions = {
        0: CorruptionSpec(),
        5: CorruptionSpec(),
        1: CorruptionSpec(spurious_rate=0.10, giant_mask_rate=0.05, dropout_rate=0.05),
        2: CorruptionSpec(spurious_rate=0.05, giant_mask_rate=0.10, dropout_rate=0.10),
        3: CorruptionSpec(spurious_rate=0.15, giant_mask_rate=0.05, dropout_rate=0.05),
        4: CorruptionSpec(spurious_rate=0.08, giant_mask_rate=0.08, dropout_rate=0.08),
        6: CorruptionSpec(spurious_rate=0.12, giant_mask_rate=0.08, dropout_rate=0.05),
        7: CorruptionSpec(spurious_rate=0.05, giant_mask_rate=0.05, dropout_rate=0.15),
        8: CorruptionSpec(spurious_rate=0.10, giant_mask_rate=0.10, dropout_rate=0.05),
        9: CorruptionSpec(spurious_rate=0.07, giant_mask_rate=0.06, dropout_rate=0.07),
    }
    suite = {}
    for i in range(10):
        duration_s = 8.0 + 4.0 * i / 9.0
        truth = 10.0 + 7.0 * i / 9.0
        bowl = 110.0 + 4.0 * i
        suite[f"ref_{i:02d}"] = SceneSpec(
            seed=1000 + i,
            frame_count=int(round(duration_s * 30.0)),
            fps=30.0,
            spoon=SpoonSpec(bowl_length_px=bowl),
            food=FoodSpec(shape=shapes[i % 3], true_volume_cm3=truth),
            corruption=corruptions[i],
        )
    return suite
