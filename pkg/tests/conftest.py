from __future__ import annotations

import numpy as np
import pytest

from spoonvol.masks import FrameObservation, InstanceMask, Label, mask_from_grid


def grid_from_pixels(pixels, width, height):
    grid = np.zeros((height, width), dtype=bool)
    for x, y in pixels:
        grid[y, x] = True
    return grid


def mask_from_pixels(pixels, width, height, label=Label.FOOD, confidence=0.9):
    return mask_from_grid(grid_from_pixels(pixels, width, height), label, confidence)


def point_mask(x, y, width, height, label=Label.FOOD, confidence=0.9):
    return mask_from_pixels([(x, y)], width, height, label=label, confidence=confidence)


def empty_mask(width, height, label=Label.FOOD, confidence=0.9):
    return InstanceMask(
        label=label,
        confidence=confidence,
        width=width,
        height=height,
        rle=(width * height,),
    )


def frame_of(instances, width, height, frame_index=0, timestamp_s=0.0):
    return FrameObservation(
        frame_index=frame_index,
        timestamp_s=timestamp_s,
        image_width=width,
        image_height=height,
        instances=tuple(instances),
    )


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
