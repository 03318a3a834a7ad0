"""Mask propagation from a single primed frame via dense optical flow.

Stands in for a dedicated video-object-segmentation model: the primed
labeled masks are warped forward frame to frame with Farneback flow.
Divergence is declared when a warped mask's area leaves a band around
its primed area or the appearance under the mask drifts too far from
the primed appearance; from that point on the track is lost and every
subsequent frame yields an empty instance list, which downstream
filtering treats as bad frames.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import cv2
import numpy as np

from .backends import Detection

AREA_BAND = (0.25, 4.0)  # warped/primed area ratio considered alive
COLOR_DRIFT_LIMIT = 60.0  # mean BGR distance under the mask vs primed


def _gray(frame_bgr: np.ndarray) -> np.ndarray:
    return cv2.cvtColor(frame_bgr, cv2.COLOR_BGR2GRAY)


def _mean_color(frame_bgr: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return frame_bgr[mask].reshape(-1, 3).mean(axis=0)


def _warp_mask(mask: np.ndarray, flow_back: np.ndarray) -> np.ndarray:
    h, w = mask.shape
    xs, ys = np.meshgrid(np.arange(w, dtype=np.float32), np.arange(h, dtype=np.float32))
    map_x = xs + flow_back[:, :, 0]
    map_y = ys + flow_back[:, :, 1]
    warped = cv2.remap(
        mask.astype(np.float32),
        map_x,
        map_y,
        interpolation=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=0.0,
    )
    return warped >= 0.5


class FlowPropagator:
    """Forward-propagates one primed segmentation across a frame stream."""

    def __init__(self, prime_frame_bgr: np.ndarray, primed: Sequence[Detection]) -> None:
        if not primed:
            raise ValueError("cannot prime the propagator with zero instances")
        self._prev_gray = _gray(prime_frame_bgr)
        self._tracks = list(primed)
        self._primed_areas = [int(d.mask.sum()) for d in primed]
        self._primed_colors = [_mean_color(prime_frame_bgr, d.mask) for d in primed]
        self.diverged = False

    def step(self, frame_bgr: np.ndarray) -> list[Detection]:
        """Advance to the next frame; empty list once the track is lost."""
        if self.diverged:
            return []
        gray = _gray(frame_bgr)
        # backward flow (current -> previous) gives the sample positions
        # for warping the previous mask onto the current frame
        flow_back = cv2.calcOpticalFlowFarneback(
            gray, self._prev_gray, None, 0.5, 3, 21, 3, 5, 1.2, 0
        )
        warped = []
        for det, primed_area, primed_color in zip(
            self._tracks, self._primed_areas, self._primed_colors
        ):
            mask = _warp_mask(det.mask, flow_back)
            area = int(mask.sum())
            if not primed_area * AREA_BAND[0] <= area <= primed_area * AREA_BAND[1]:
                self.diverged = True
                return []
            drift = float(np.linalg.norm(_mean_color(frame_bgr, mask) - primed_color))
            if drift > COLOR_DRIFT_LIMIT:
                self.diverged = True
                return []
            warped.append(Detection(det.label, det.confidence, mask))
        self._tracks = warped
        self._prev_gray = gray
        return list(warped)


def prime_vos(
    frames: Iterable[np.ndarray], primed: Sequence[Detection]
) -> Iterator[list[Detection]]:
    """Propagate ``primed`` over ``frames``; the first frame is the primer.

    Yields one instance list per input frame (the first is the primed
    segmentation itself). Divergence yields empty lists from then on.
    """
    iterator = iter(frames)
    try:
        first = next(iterator)
    except StopIteration:
        return
    propagator = FlowPropagator(first, primed)
    yield list(primed)
    for frame in iterator:
        yield propagator.step(frame)
