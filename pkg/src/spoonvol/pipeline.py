"""Per-video orchestration: downsample, gate, calibrate, estimate, filter.

The key-frame decisions define a measurement window spanning the first
through the last active frame. Every processed frame inside that window
feeds the filter in order; frames on which measurement failed (no pair,
too far, calibration error, implausible volume) enter as bad frames
rather than being skipped, so the filter sees the full timeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import __version__
from .calibration import UtensilCalibration, calibrate
from .errors import DegenerateCurve, EmptyCurve, EmptyMask, NoBendFound
from .filtering import FilteredSeries, VideoPrediction, aggregate, run_filter
from .keyframe import DecisionReason, decide
from .masks import FrameObservation, centroid
from .volume import ShapeModel, VolumeConstants, estimate_frame

CALIBRATION_ERRORS = (NoBendFound, DegenerateCurve, EmptyCurve, EmptyMask)


@dataclass(frozen=True)
class PipelineConfig:
    shape: ShapeModel = ShapeModel.ELLIPSOID
    keyframe_threshold: float = 0.5
    downsample_stride: int = 5
    constants: VolumeConstants = field(default_factory=VolumeConstants)
    spoon_first: bool = True
    filter_enabled: bool = True

    def __post_init__(self) -> None:
        if self.downsample_stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.downsample_stride}")
        if not 0.0 < self.keyframe_threshold <= 1.0:
            raise ValueError(
                f"keyframe threshold must lie in (0, 1], got {self.keyframe_threshold}"
            )

    def to_json(self) -> dict[str, Any]:
        return {
            "shape": self.shape.value,
            "keyframe_threshold": self.keyframe_threshold,
            "downsample_stride": self.downsample_stride,
            "constants": {
                "spoon_width_cm": self.constants.spoon_width_cm,
                "bowl_surplus_cm3": self.constants.bowl_surplus_cm3,
                "max_plausible_cm3": self.constants.max_plausible_cm3,
            },
            "spoon_first": self.spoon_first,
            "filter_enabled": self.filter_enabled,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "PipelineConfig":
        kwargs: dict[str, Any] = {}
        if "shape" in obj:
            kwargs["shape"] = ShapeModel(obj["shape"])
        for key in ("keyframe_threshold", "spoon_first", "filter_enabled"):
            if key in obj:
                kwargs[key] = obj[key]
        if "downsample_stride" in obj:
            kwargs["downsample_stride"] = int(obj["downsample_stride"])
        if "constants" in obj:
            kwargs["constants"] = VolumeConstants(**obj["constants"])
        return cls(**kwargs)


@dataclass(frozen=True)
class FrameResult:
    frame_index: int
    timestamp_s: float
    reason: DecisionReason
    raw_cm3: Optional[float] = None
    stored_cm3: Optional[float] = None
    cm_per_px: Optional[float] = None
    plausible: bool = False


@dataclass(frozen=True)
class VideoResult:
    video_id: str
    shape: ShapeModel
    frames: tuple[FrameResult, ...]
    final_cm3: Optional[float]
    window_start: Optional[int]  # frame_index bounds of the measurement window
    window_end: Optional[int]

    @property
    def has_active_frames(self) -> bool:
        return self.window_start is not None


def downsample(frames: Sequence[FrameObservation], stride: int) -> list[FrameObservation]:
    """Keep only frames whose frame_index is a multiple of the stride."""
    return [f for f in frames if f.frame_index % stride == 0]


def estimate_video(
    video_id: str,
    frames: Sequence[FrameObservation],
    config: PipelineConfig,
) -> VideoResult:
    processed = downsample(frames, config.downsample_stride)
    decisions = [
        decide(f, config.keyframe_threshold, config.spoon_first) for f in processed
    ]
    active = [i for i, d in enumerate(decisions) if d.active]
    if not active:
        results = tuple(
            FrameResult(f.frame_index, f.timestamp_s, d.reason)
            for f, d in zip(processed, decisions)
        )
        return VideoResult(video_id, config.shape, results, None, None, None)

    lo, hi = active[0], active[-1]
    vols: list[Optional[float]] = []
    records: list[FrameResult] = []
    for f, d in zip(processed[: lo], decisions[: lo]):
        records.append(FrameResult(f.frame_index, f.timestamp_s, d.reason))
    for f, d in zip(processed[lo : hi + 1], decisions[lo : hi + 1]):
        raw: Optional[float] = None
        cal: Optional[UtensilCalibration] = None
        plausible = False
        if d.active:
            cand = d.candidate
            try:
                cal = calibrate(cand.utensil, cand.utensil_kind, centroid(cand.food))
            except CALIBRATION_ERRORS:
                cal = None
            est = estimate_frame(cand, cal, config.shape, config.constants, f.frame_index)
            raw, plausible = est.raw_cm3, est.plausible
        vols.append(raw)
        records.append(
            FrameResult(
                frame_index=f.frame_index,
                timestamp_s=f.timestamp_s,
                reason=d.reason,
                raw_cm3=raw,
                cm_per_px=cal.cm_per_px if cal is not None else None,
                plausible=plausible,
            )
        )

    if config.filter_enabled:
        stored: list[Optional[float]] = list(run_filter(vols, config.constants))
        series = aggregate([s for s in stored], [True] * len(stored))
        final = series.final_cm3
    else:
        stored = list(vols)  # raw pass-through; absent stays absent
        present = [v for v in stored if v is not None]
        final = sum(present) / len(present) if present else 0.0

    offset = len(records) - len(stored)
    records = [
        rec if i < offset else _with_stored(rec, stored[i - offset])
        for i, rec in enumerate(records)
    ]
    for f, d in zip(processed[hi + 1 :], decisions[hi + 1 :]):
        records.append(FrameResult(f.frame_index, f.timestamp_s, d.reason))
    return VideoResult(
        video_id=video_id,
        shape=config.shape,
        frames=tuple(records),
        final_cm3=final,
        window_start=processed[lo].frame_index,
        window_end=processed[hi].frame_index,
    )


def _with_stored(rec: FrameResult, stored: Optional[float]) -> FrameResult:
    return FrameResult(
        frame_index=rec.frame_index,
        timestamp_s=rec.timestamp_s,
        reason=rec.reason,
        raw_cm3=rec.raw_cm3,
        stored_cm3=stored,
        cm_per_px=rec.cm_per_px,
        plausible=rec.plausible,
    )


def video_result_to_json(result: VideoResult) -> dict[str, Any]:
    return {
        "shape": result.shape.value,
        "final_cm3": result.final_cm3,
        "window_start": result.window_start,
        "window_end": result.window_end,
        "frames": [
            {
                "frame_index": r.frame_index,
                "timestamp_s": r.timestamp_s,
                "reason": r.reason.value,
                "raw_cm3": r.raw_cm3,
                "stored_cm3": r.stored_cm3,
                "cm_per_px": r.cm_per_px,
                "plausible": r.plausible,
            }
            for r in result.frames
        ],
    }


def prediction_from_result_json(obj: dict[str, Any]) -> Optional[VideoPrediction]:
    """Extract evaluation input from a serialized video result."""
    if obj.get("final_cm3") is None:
        return None
    stored = tuple(
        f["stored_cm3"] for f in obj["frames"] if f.get("stored_cm3") is not None
    )
    return VideoPrediction(stored_cm3=stored, final_cm3=float(obj["final_cm3"]))


def filtered_series(result: VideoResult) -> FilteredSeries:
    """The stored series and final of a measured video, for reporting."""
    stored = tuple(r.stored_cm3 for r in result.frames if r.stored_cm3 is not None)
    if result.final_cm3 is None:
        raise ValueError(f"video {result.video_id} has no measurements")
    return FilteredSeries(stored_cm3=stored, final_cm3=result.final_cm3)


def run_manifest(
    input_paths: Sequence[str],
    config: PipelineConfig,
    results: Sequence[VideoResult],
) -> dict[str, Any]:
    """Everything needed to replay a run, plus per-video summaries."""
    return {
        "tool": "spoonvol",
        "tool_version": __version__,
        "inputs": list(input_paths),
        "config": config.to_json(),
        "videos": {
            r.video_id: {
                "final_cm3": r.final_cm3,
                "frames_processed": len(r.frames),
                "window_start": r.window_start,
                "window_end": r.window_end,
            }
            for r in results
        },
    }
