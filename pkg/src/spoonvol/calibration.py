"""Per-frame metric scale from the utensil-neck bend.

Standard cutlery has a fixed metric length between the tip and the neck
bend (6 cm for a spoon bowl, 7.5 cm tip-to-neck for a fork), so locating
both endpoints on the mask's top curve yields a cm-per-pixel factor valid
in the utensil's plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Literal, Sequence

from .errors import DegenerateCurve, EmptyCurve, NoBendFound
from .masks import InstanceMask, Label, PixelPoint, top_curve

TipSide = Literal["left", "right"]


class UtensilKind(Enum):
    SPOON = "Spoon"
    FORK = "Fork"

    @property
    def bend_angle_threshold_deg(self) -> float:
        # Detection thresholds sit below the physical neck angles
        # (~30 deg spoon, ~15 deg fork) to keep detection reliable.
        return 15.0 if self is UtensilKind.SPOON else 7.0

    @property
    def reference_length_cm(self) -> float:
        return 6.0 if self is UtensilKind.SPOON else 7.5

    @property
    def mask_label(self) -> Label:
        return Label.SPOON if self is UtensilKind.SPOON else Label.FORK

    @classmethod
    def from_label(cls, label: Label) -> "UtensilKind":
        if label is Label.SPOON:
            return cls.SPOON
        if label is Label.FORK:
            return cls.FORK
        raise ValueError(f"{label} is not a utensil label")


@dataclass(frozen=True)
class UtensilCalibration:
    """Pixel-to-metric scale recovered from one utensil mask."""

    cm_per_px: float
    tip_x: float
    bend_x: float
    bowl_length_px: float
    kind: UtensilKind

    def __post_init__(self) -> None:
        if self.bowl_length_px <= 0:
            raise ValueError(f"bowl_length_px {self.bowl_length_px} must be > 0")
        if abs(self.bowl_length_px - abs(self.bend_x - self.tip_x)) > 1e-6:
            raise ValueError("bowl_length_px must equal |bend_x - tip_x|")
        expected = self.kind.reference_length_cm / self.bowl_length_px
        if abs(self.cm_per_px - expected) > 1e-9 * max(1.0, expected):
            raise ValueError("cm_per_px must equal reference_length_cm / bowl_length_px")


def scale_from_bowl_length(kind: UtensilKind, bowl_length_px: float, tip_x: float = 0.0) -> UtensilCalibration:
    """Convenience constructor keeping the calibration invariants."""
    bend_x = tip_x + bowl_length_px
    return UtensilCalibration(
        cm_per_px=kind.reference_length_cm / bowl_length_px,
        tip_x=tip_x,
        bend_x=bend_x,
        bowl_length_px=bowl_length_px,
        kind=kind,
    )


def smooth_curve(curve: Sequence[PixelPoint], window: int = 5) -> list[PixelPoint]:
    """Centered moving average of y, truncated at the curve ends.

    x coordinates pass through untouched. The window shrinks near the ends
    instead of padding, so no geometry is fabricated at the tip.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    if len(curve) == 0:
        raise EmptyCurve("cannot smooth an empty curve")
    half = window // 2
    n = len(curve)
    out = []
    for i, p in enumerate(curve):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        mean_y = sum(q.y for q in curve[lo:hi]) / (hi - lo)
        out.append(PixelPoint(p.x, mean_y))
    return out


def curve_gradient(curve: Sequence[PixelPoint]) -> list[float]:
    """Slope between each adjacent point pair; output length is len - 1."""
    if len(curve) < 2:
        raise DegenerateCurve(f"need >= 2 points to take a gradient, got {len(curve)}")
    grads = []
    for a, b in zip(curve, curve[1:]):
        dx = b.x - a.x
        if dx == 0:
            raise DegenerateCurve(f"repeated x coordinate at x={a.x}")
        grads.append((b.y - a.y) / dx)
    return grads


# Segments averaged into the tip-side reference angle; one quantized
# segment is too noisy a slope estimate, so match the smoothing window.
BASELINE_SEGMENTS = 5


def detect_bend(curve: Sequence[PixelPoint], kind: UtensilKind, from_tip: TipSide) -> float:
    """x coordinate of the first bend encountered walking from the tip end.

    At each interior point the slope angle of the far-side segment is
    compared against the mean slope angle of the segments adjacent to the
    tip; the first point where the absolute angle change exceeds the
    kind's threshold is the bend. Comparing angles (not slopes) keeps the
    test meaningful for bends in either vertical direction, and the
    tip-side baseline makes it insensitive to overall utensil tilt.
    Raises NoBendFound when the whole curve stays under the threshold.
    """
    if len(curve) < 3:
        raise DegenerateCurve(f"need >= 3 points to detect a bend, got {len(curve)}")
    grads = curve_gradient(curve)
    angles = [math.degrees(math.atan(g)) for g in grads]
    threshold = kind.bend_angle_threshold_deg
    span = min(BASELINE_SEGMENTS, len(angles))
    if from_tip == "left":
        baseline = sum(angles[:span]) / span
        # vertex i takes the outgoing segment (i -> i+1), index i in grads
        indices = range(1, len(curve) - 1)
        segment_of = lambda i: angles[i]
    elif from_tip == "right":
        baseline = sum(angles[-span:]) / span
        indices = range(len(curve) - 2, 0, -1)
        segment_of = lambda i: angles[i - 1]
    else:
        raise ValueError(f"from_tip must be 'left' or 'right', got {from_tip!r}")
    for i in indices:
        if abs(segment_of(i) - baseline) > threshold:
            return curve[i].x
    raise NoBendFound(
        f"no angle change above {threshold} deg on a {len(curve)}-point curve"
    )


def calibrate(
    utensil: InstanceMask,
    kind: UtensilKind,
    food_centroid: PixelPoint,
    smoothing_window: int = 5,
) -> UtensilCalibration:
    """Recover cm-per-pixel scale from a utensil mask.

    The curve endpoint horizontally nearer the food centroid is taken as
    the tip (food sits in the bowl); the bend is searched walking away
    from it. Propagates EmptyMask / DegenerateCurve / NoBendFound.
    """
    curve = smooth_curve(top_curve(utensil), smoothing_window)
    if len(curve) < 3:
        raise DegenerateCurve(
            f"utensil top curve has only {len(curve)} column(s) after smoothing"
        )
    left, right = curve[0], curve[-1]
    if abs(left.x - food_centroid.x) <= abs(right.x - food_centroid.x):
        tip, side = left, "left"
    else:
        tip, side = right, "right"
    bend_x = detect_bend(curve, kind, side)
    bowl_length_px = abs(bend_x - tip.x)
    return UtensilCalibration(
        cm_per_px=kind.reference_length_cm / bowl_length_px,
        tip_x=tip.x,
        bend_x=bend_x,
        bowl_length_px=bowl_length_px,
        kind=kind,
    )
