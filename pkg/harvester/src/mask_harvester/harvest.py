"""The harvest loop: sampled video frames to an interchange document."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Iterator

import cv2
import numpy as np

from . import __version__
from .backends import Detection, Segmenter
from .config import RECOMMENDED_MAX_STRIDE, HarvestConfig
from .errors import VideoDecodeError
from .rle import encode_mask
from .vos import FlowPropagator

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_FPS = 30.0


def read_sampled_frames(
    path: Path, stride: int
) -> tuple[float, Iterator[tuple[int, np.ndarray]]]:
    """Open a video and return (fps, iterator of (frame_index, bgr frame))."""
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise VideoDecodeError(f"cannot open video {path}")
    fps = capture.get(cv2.CAP_PROP_FPS) or 0.0
    if fps <= 0:
        fps = DEFAULT_FPS

    def frames() -> Iterator[tuple[int, np.ndarray]]:
        index = 0
        try:
            while True:
                ok, frame = capture.read()
                if not ok:
                    break
                if index % stride == 0:
                    yield index, frame
                index += 1
        finally:
            capture.release()
        if index == 0:
            raise VideoDecodeError(f"video {path} contains no decodable frames")

    return float(fps), frames()


def _instances_json(detections: list[Detection], floor: float) -> list[dict[str, Any]]:
    kept = [d for d in detections if d.confidence >= floor]
    return [
        {
            "label": d.label,
            "confidence": d.confidence,
            "rle": encode_mask(d.mask),
        }
        for d in kept
    ]


def _frame_json(index: int, fps: float, shape: tuple[int, int], instances: list) -> dict:
    return {
        "frame_index": index,
        "timestamp_s": index / fps,
        "image_width": shape[1],
        "image_height": shape[0],
        "instances": instances,
    }


PRIME_FACE_FRACTION = 0.5  # utensil-to-face gate, as a fraction of image height


def _centroid(mask: np.ndarray) -> tuple[float, float]:
    ys, xs = np.nonzero(mask)
    return float(xs.mean()), float(ys.mean())


def _primes_vos(detections: list[Detection], floor: float, image_height: int) -> bool:
    """Key-frame-quality check: food, a utensil, and a face are all present
    and the utensil is lifted near the face. Only such a frame is worth
    priming the propagator with."""
    kept = {d.label: d for d in detections if d.confidence >= floor and d.mask.any()}
    utensil = kept.get("Spoon") or kept.get("Fork")
    if "Food" not in kept or utensil is None or "Face" not in kept:
        return False
    ux, uy = _centroid(utensil.mask)
    fx, fy = _centroid(kept["Face"].mask)
    distance = ((ux - fx) ** 2 + (uy - fy) ** 2) ** 0.5
    return distance < PRIME_FACE_FRACTION * image_height


def harvest(config: HarvestConfig, segmenter: Segmenter) -> dict[str, Any]:
    """Run the configured backend over the video; returns the document."""
    if config.stride > RECOMMENDED_MAX_STRIDE:
        logger.warning(
            "stride %d exceeds the recommended maximum of %d; "
            "large frame gaps degrade mask propagation",
            config.stride,
            RECOMMENDED_MAX_STRIDE,
        )
    fps, frames = read_sampled_frames(config.video, config.stride)
    frame_docs = []
    propagator: FlowPropagator | None = None
    for index, frame in frames:
        if config.backend == "frames":
            detections = segmenter.segment(frame)
        elif propagator is None:
            detections = segmenter.segment(frame)
            if _primes_vos(detections, config.confidence_floor, frame.shape[0]):
                propagator = FlowPropagator(frame, detections)
        else:
            detections = propagator.step(frame)
        frame_docs.append(
            _frame_json(
                index,
                fps,
                frame.shape[:2],
                _instances_json(detections, config.confidence_floor),
            )
        )
    return {
        "version": SCHEMA_VERSION,
        "fps": fps,
        "frames": frame_docs,
        "harvester": {
            "tool_version": __version__,
            "video": config.video.name,
            "backend": config.backend,
            "stride": config.stride,
            "confidence_floor": config.confidence_floor,
            "prompts": list(config.prompts),
            "segmenter": segmenter.manifest(),
            "opencv_version": cv2.__version__,
        },
    }
