"""Interchange JSON format (schema version 1).

One document per video:

    {
      "version": 1,
      "fps": 30.0,
      "frames": [
        {
          "frame_index": 0,
          "timestamp_s": 0.0,
          "image_width": 320,
          "image_height": 240,
          "instances": [
            {"label": "Spoon", "confidence": 0.95, "rle": [12, 3, ...]},
            ...
          ]
        },
        ...
      ]
    }

Unknown keys are ignored so producers can attach provenance; missing keys
are errors. ``frame_index`` must be strictly increasing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from .errors import InterchangeError, MalformedRle
from .masks import FrameObservation, InstanceMask, Label, validate_rle

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class VideoDocument:
    video_id: str
    fps: float
    frames: tuple[FrameObservation, ...]


def _require(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise InterchangeError(f"{where}: missing key {key!r}")
    return obj[key]


def _parse_instance(obj: Mapping[str, Any], width: int, height: int, where: str) -> InstanceMask:
    raw_label = _require(obj, "label", where)
    try:
        label = Label.parse(str(raw_label))
    except ValueError as exc:
        raise InterchangeError(f"{where}: {exc}") from exc
    confidence = _require(obj, "confidence", where)
    rle = _require(obj, "rle", where)
    if not isinstance(rle, list):
        raise InterchangeError(f"{where}: rle must be a list of run lengths")
    try:
        validate_rle([int(r) for r in rle], width, height)
        return InstanceMask(
            label=label,
            confidence=float(confidence),
            width=width,
            height=height,
            rle=tuple(int(r) for r in rle),
        )
    except (MalformedRle, TypeError, ValueError) as exc:
        raise InterchangeError(f"{where}: {exc}") from exc


def _parse_frame(obj: Mapping[str, Any], where: str) -> FrameObservation:
    frame_index = _require(obj, "frame_index", where)
    where = f"{where} (frame {frame_index})"
    timestamp_s = _require(obj, "timestamp_s", where)
    width = _require(obj, "image_width", where)
    height = _require(obj, "image_height", where)
    raw_instances = _require(obj, "instances", where)
    instances = [
        _parse_instance(inst, int(width), int(height), f"{where} instance {i}")
        for i, inst in enumerate(raw_instances)
    ]
    try:
        return FrameObservation(
            frame_index=int(frame_index),
            timestamp_s=float(timestamp_s),
            image_width=int(width),
            image_height=int(height),
            instances=tuple(instances),
        )
    except ValueError as exc:
        raise InterchangeError(f"{where}: {exc}") from exc


def parse_document(obj: Mapping[str, Any], video_id: str, where: str = "document") -> VideoDocument:
    """Parse and validate an interchange document already loaded from JSON."""
    version = _require(obj, "version", where)
    if version != SCHEMA_VERSION:
        raise InterchangeError(f"{where}: unsupported version {version!r}, expected {SCHEMA_VERSION}")
    fps = float(_require(obj, "fps", where))
    raw_frames = _require(obj, "frames", where)
    frames = [_parse_frame(f, where) for f in raw_frames]
    last = -1
    for frame in frames:
        if frame.frame_index <= last:
            raise InterchangeError(
                f"{where}: frame_index {frame.frame_index} not strictly increasing"
            )
        last = frame.frame_index
    return VideoDocument(video_id=video_id, fps=fps, frames=tuple(frames))


def load_video(path: str | Path) -> VideoDocument:
    """Load an interchange JSON file; the video id is the file stem."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InterchangeError(f"{path}: invalid JSON: {exc}") from exc
    return parse_document(obj, video_id=path.stem, where=str(path))


def document_to_json(fps: float, frames: Sequence[FrameObservation]) -> dict[str, Any]:
    """Serialize frames into the schema-v1 document structure."""
    return {
        "version": SCHEMA_VERSION,
        "fps": fps,
        "frames": [
            {
                "frame_index": f.frame_index,
                "timestamp_s": f.timestamp_s,
                "image_width": f.image_width,
                "image_height": f.image_height,
                "instances": [
                    {
                        "label": inst.label.value,
                        "confidence": inst.confidence,
                        "rle": list(inst.rle),
                    }
                    for inst in f.instances
                ],
            }
            for f in frames
        ],
    }


def dump_json(obj: Any, path: str | Path) -> None:
    """Write JSON deterministically (sorted keys, fixed layout)."""
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")
