"""Mask data model, RLE codec, and 2D mask geometry.

Every mask travels as a run-length encoding: row-major scan order, runs
alternate background/foreground, and the first run always counts background
pixels (so it is 0 when the very first pixel is foreground). Zero-length
runs are only legal in that leading position. Pixel coordinates are pixel
centers at integer positions, x growing right and y growing down; derived
quantities like centroids are real-valued.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import EmptyMask, MalformedRle


class Label(Enum):
    """Closed set of instance labels the pipeline understands."""

    FOOD = "Food"
    SPOON = "Spoon"
    FORK = "Fork"
    FACE = "Face"

    @classmethod
    def parse(cls, text: str) -> "Label":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(
            f"unknown label {text!r}; expected one of {[m.value for m in cls]}"
        )


@dataclass(frozen=True)
class PixelPoint:
    """A point in image coordinates (y increases downward)."""

    x: float
    y: float


@dataclass(frozen=True)
class InstanceMask:
    """One labeled binary mask with its detection confidence.

    ``width`` and ``height`` are the full image dimensions; the RLE spans
    the whole image, not a bounding box.
    """

    label: Label
    confidence: float
    width: int
    height: int
    rle: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.label, Label):
            raise TypeError(f"label must be a Label, got {self.label!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"mask dimensions {self.width}x{self.height} invalid")
        object.__setattr__(self, "rle", tuple(int(r) for r in self.rle))


@dataclass(frozen=True)
class FrameObservation:
    """All instance masks seen in one frame."""

    frame_index: int
    timestamp_s: float
    image_width: int
    image_height: int
    instances: tuple[InstanceMask, ...]

    def __post_init__(self) -> None:
        if self.frame_index < 0:
            raise ValueError(f"frame_index {self.frame_index} negative")
        object.__setattr__(self, "instances", tuple(self.instances))
        for inst in self.instances:
            if inst.width != self.image_width or inst.height != self.image_height:
                raise ValueError(
                    f"instance dims {inst.width}x{inst.height} do not match "
                    f"frame dims {self.image_width}x{self.image_height}"
                )


def validate_rle(rle: Sequence[int], width: int, height: int) -> None:
    """Raise MalformedRle unless ``rle`` encodes a ``height``x``width`` mask."""
    total = 0
    for i, run in enumerate(rle):
        if run < 0:
            raise MalformedRle(f"run {i} is negative ({run})")
        if run == 0 and i != 0:
            raise MalformedRle(f"zero-length run at position {i} (only the leading run may be 0)")
        total += run
    if total != width * height:
        raise MalformedRle(
            f"runs sum to {total}, expected {width}x{height}={width * height}"
        )


def rle_decode(mask: InstanceMask) -> np.ndarray:
    """Decode a mask to a boolean (height, width) grid."""
    validate_rle(mask.rle, mask.width, mask.height)
    values = np.arange(len(mask.rle)) % 2 == 1  # runs alternate bg/fg, bg first
    flat = np.repeat(values, mask.rle)
    return flat.reshape(mask.height, mask.width)


def rle_encode(grid: np.ndarray) -> tuple[int, ...]:
    """Encode a 2D binary grid as canonical run lengths.

    Inverse of :func:`rle_decode`: a leading 0 is emitted only when the first
    pixel is foreground, and no other run is ever zero-length.
    """
    arr = np.asarray(grid, dtype=bool)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"grid must be a non-empty 2D array, got shape {arr.shape}")
    flat = arr.ravel()
    boundaries = np.flatnonzero(np.diff(flat.astype(np.int8))) + 1
    edges = np.concatenate(([0], boundaries, [flat.size]))
    runs = np.diff(edges).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return tuple(int(r) for r in runs)


def mask_from_grid(
    grid: np.ndarray, label: Label, confidence: float
) -> InstanceMask:
    """Build an InstanceMask from a binary grid."""
    arr = np.asarray(grid, dtype=bool)
    return InstanceMask(
        label=label,
        confidence=confidence,
        width=int(arr.shape[1]),
        height=int(arr.shape[0]),
        rle=rle_encode(arr),
    )


def _foreground(mask: InstanceMask) -> tuple[np.ndarray, np.ndarray]:
    ys, xs = np.nonzero(rle_decode(mask))
    if xs.size == 0:
        raise EmptyMask(f"{mask.label.value} mask has no foreground pixels")
    return xs, ys


def area_px(mask: InstanceMask) -> int:
    """Foreground pixel count (0 for an empty mask)."""
    runs = np.asarray(mask.rle)
    validate_rle(mask.rle, mask.width, mask.height)
    return int(runs[1::2].sum())


def centroid(mask: InstanceMask) -> PixelPoint:
    """Arithmetic mean of foreground pixel centers."""
    xs, ys = _foreground(mask)
    return PixelPoint(float(xs.mean()), float(ys.mean()))


def extents(mask: InstanceMask) -> tuple[int, int, int, int]:
    """Tight bounding box as (min_x, max_x, min_y, max_y), inclusive."""
    xs, ys = _foreground(mask)
    return int(xs.min()), int(xs.max()), int(ys.min()), int(ys.max())


def top_curve(mask: InstanceMask) -> list[PixelPoint]:
    """Topmost foreground pixel per occupied column, in ascending x.

    Columns with no foreground are skipped, so consecutive output points can
    be more than one pixel apart in x.
    """
    grid = rle_decode(mask)
    occupied = grid.any(axis=0)
    if not occupied.any():
        raise EmptyMask(f"{mask.label.value} mask has no foreground pixels")
    top = np.argmax(grid, axis=0)  # first True row per column
    return [PixelPoint(float(x), float(top[x])) for x in np.flatnonzero(occupied)]
