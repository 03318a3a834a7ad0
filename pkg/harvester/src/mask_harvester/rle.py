"""Run-length encoding matching interchange schema v1 bit-exactly.

Row-major scan, runs alternate background/foreground, first run counts
background pixels (0 when the first pixel is foreground), and no run
other than the leading one may be zero-length. Runs sum to width*height.
"""

from __future__ import annotations

import numpy as np


def encode_mask(mask: np.ndarray) -> list[int]:
    arr = np.asarray(mask, dtype=bool)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"mask must be a non-empty 2D array, got shape {arr.shape}")
    flat = arr.ravel()
    boundaries = np.flatnonzero(np.diff(flat.astype(np.int8))) + 1
    edges = np.concatenate(([0], boundaries, [flat.size]))
    runs = np.diff(edges).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return [int(r) for r in runs]


def decode_mask(runs: list[int], width: int, height: int) -> np.ndarray:
    if sum(runs) != width * height:
        raise ValueError(f"runs sum to {sum(runs)}, expected {width * height}")
    values = np.arange(len(runs)) % 2 == 1
    return np.repeat(values, runs).reshape(height, width)
