"""Sequential spurious-volume filtering, final aggregation, and evaluation.

The filter is a small state machine run over the per-frame volumes of one
video, in order. A frame is good when its volume lies strictly inside
(0, max_plausible_cm3). Good frames store their raw volume and refresh a
5-frame bad budget; bad frames store the running mean of the goods seen
since the last reset. Once five consecutive bad frames exhaust the budget,
the mean resets to zero and zeros are stored until a good frame restarts
it. This keeps one blurred or misclassified segmentation from dragging a
whole video's estimate while still tracking a subject that genuinely put
the utensil down.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import MissingGroundTruth, NoActiveFrames
from .volume import VolumeConstants

BAD_BUDGET_FRAMES = 5


@dataclass(frozen=True)
class FilterState:
    running_mean_cm3: float = 0.0
    good_count: int = 0
    bad_budget: int = BAD_BUDGET_FRAMES

    def __post_init__(self) -> None:
        if not 0 <= self.bad_budget <= BAD_BUDGET_FRAMES:
            raise ValueError(f"bad_budget {self.bad_budget} outside [0, {BAD_BUDGET_FRAMES}]")
        if self.good_count == 0 and self.running_mean_cm3 != 0.0:
            raise ValueError("running mean must be 0 when no good frames are tracked")
        if self.running_mean_cm3 < 0 or self.good_count < 0:
            raise ValueError("state fields must be non-negative")


def filter_step(
    state: FilterState,
    vol: Optional[float],
    bounds: VolumeConstants,
) -> tuple[FilterState, float]:
    """Advance the filter by one frame; returns (new state, stored prediction).

    An absent volume (failed calibration, no measurable pair) is a bad
    frame by definition.
    """
    good = vol is not None and 0.0 < vol < bounds.max_plausible_cm3
    if good:
        count = state.good_count + 1
        mean = state.running_mean_cm3 + (vol - state.running_mean_cm3) / count
        return FilterState(mean, count, BAD_BUDGET_FRAMES), float(vol)
    if state.bad_budget == 0:
        return FilterState(0.0, 0, 0), 0.0
    return (
        FilterState(state.running_mean_cm3, state.good_count, state.bad_budget - 1),
        state.running_mean_cm3,
    )


def run_filter(
    vols: Sequence[Optional[float]],
    bounds: VolumeConstants = VolumeConstants(),
) -> list[float]:
    """Run the filter over a whole volume series, returning stored predictions."""
    state = FilterState()
    stored = []
    for vol in vols:
        state, prediction = filter_step(state, vol, bounds)
        stored.append(prediction)
    return stored


@dataclass(frozen=True)
class FilteredSeries:
    """Stored per-frame predictions plus their aggregate for one video."""

    stored_cm3: tuple[float, ...]
    final_cm3: float
    best_frame_cm3: Optional[float] = None  # filled in at evaluation time


def aggregate(
    stored: Sequence[float],
    active_flags: Sequence[bool],
) -> FilteredSeries:
    """Mean of the stored predictions inside the active key-frame window."""
    if len(stored) != len(active_flags):
        raise ValueError("stored series and window flags must have equal length")
    window = [s for s, flag in zip(stored, active_flags) if flag]
    if not window:
        raise NoActiveFrames("no frames inside the active key-frame window")
    return FilteredSeries(
        stored_cm3=tuple(float(s) for s in stored),
        final_cm3=sum(window) / len(window),
    )


@dataclass(frozen=True)
class VideoPrediction:
    """What the pipeline produced for one video, as evaluation input."""

    stored_cm3: tuple[float, ...]
    final_cm3: float


@dataclass(frozen=True)
class VideoScore:
    video_id: str
    per_frame_mae_cm3: float
    per_frame_mape: float
    final_mae_cm3: float
    final_mape: float
    best_frame_mae_cm3: float
    best_frame_mape: float
    best_frame_cm3: float


@dataclass(frozen=True)
class EvalReport:
    per_video: tuple[VideoScore, ...]
    aggregate: dict[str, float] = field(default_factory=dict)


_METRIC_FIELDS = (
    "per_frame_mae_cm3",
    "per_frame_mape",
    "final_mae_cm3",
    "final_mape",
    "best_frame_mae_cm3",
    "best_frame_mape",
)


def evaluate(
    predictions: Mapping[str, VideoPrediction],
    truths: Mapping[str, float],
) -> EvalReport:
    """MAE/MAPE per video and unweighted means across videos.

    Per-frame error is averaged within each video first so long videos do
    not dominate. MAPE values are percentages of the per-video truth. The
    best-frame metrics take the single frame closest to the truth.
    """
    scores = []
    for video_id in sorted(predictions):
        pred = predictions[video_id]
        if video_id not in truths:
            raise MissingGroundTruth(f"no ground-truth volume for video {video_id!r}")
        truth = float(truths[video_id])
        if truth <= 0:
            raise MissingGroundTruth(f"ground truth for {video_id!r} must be > 0, got {truth}")
        if not pred.stored_cm3:
            raise NoActiveFrames(f"video {video_id!r} has no stored predictions")
        frame_errors = [abs(s - truth) for s in pred.stored_cm3]
        per_frame_mae = sum(frame_errors) / len(frame_errors)
        best_idx = min(range(len(frame_errors)), key=frame_errors.__getitem__)
        final_mae = abs(pred.final_cm3 - truth)
        scores.append(
            VideoScore(
                video_id=video_id,
                per_frame_mae_cm3=per_frame_mae,
                per_frame_mape=100.0 * per_frame_mae / truth,
                final_mae_cm3=final_mae,
                final_mape=100.0 * final_mae / truth,
                best_frame_mae_cm3=frame_errors[best_idx],
                best_frame_mape=100.0 * frame_errors[best_idx] / truth,
                best_frame_cm3=pred.stored_cm3[best_idx],
            )
        )
    agg = {
        name: sum(getattr(s, name) for s in scores) / len(scores)
        for name in _METRIC_FIELDS
    }
    return EvalReport(per_video=tuple(scores), aggregate=agg)


def report_to_json(report: EvalReport) -> dict:
    return {
        "per_video": [
            {
                "video_id": s.video_id,
                **{name: getattr(s, name) for name in _METRIC_FIELDS},
                "best_frame_cm3": s.best_frame_cm3,
            }
            for s in report.per_video
        ],
        "aggregate": dict(report.aggregate),
    }


def format_report_table(report: EvalReport) -> str:
    """Aligned plain-text tables: main metrics plus a best-frame section."""

    def fmt(value: float, unit: str) -> str:
        return f"{value:.3f}" if unit == "cm3" else f"{value:.1f}%"

    main_cols = ("per_frame_mae_cm3", "per_frame_mape", "final_mae_cm3", "final_mape")
    main_headers = (
        "Video",
        "Per Frame MAE (cm^3)",
        "Per Frame MAPE",
        "Final MAE (cm^3)",
        "Final MAPE",
    )
    best_cols = ("best_frame_mae_cm3", "best_frame_mape")
    best_headers = ("Video", "Best Frame MAE (cm^3)", "Best Frame MAPE")

    def table(headers: tuple[str, ...], cols: tuple[str, ...]) -> list[str]:
        rows = [list(headers)]
        for s in report.per_video:
            rows.append(
                [s.video_id]
                + [fmt(getattr(s, c), "cm3" if c.endswith("cm3") else "pct") for c in cols]
            )
        rows.append(
            ["mean"]
            + [
                fmt(report.aggregate[c], "cm3" if c.endswith("cm3") else "pct")
                for c in cols
            ]
        )
        widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
        lines = []
        for j, row in enumerate(rows):
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
            if j == 0:
                lines.append("  ".join("-" * w for w in widths))
        return lines

    out = table(main_headers, main_cols)
    out.append("")
    out.extend(table(best_headers, best_cols))
    return "\n".join(out) + "\n"
