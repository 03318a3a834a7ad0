"""`harvest` command: real video in, interchange JSON out."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .backends import make_segmenter
from .config import BACKENDS, HarvestConfig
from .errors import HarvestError
from .harvest import harvest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harvest",
        description="Segment a video and export labeled masks as interchange JSON.",
    )
    parser.add_argument("--video", required=True, help="input video file")
    parser.add_argument("--backend", choices=BACKENDS, default="frames")
    parser.add_argument("--stride", type=int, default=5, help="sample one frame in N")
    parser.add_argument(
        "--confidence-floor",
        type=float,
        default=0.0,
        dest="confidence_floor",
        help="drop instances below this confidence",
    )
    parser.add_argument(
        "--segmenter",
        choices=("grounded", "color"),
        default="grounded",
        help="per-frame segmentation model ('color' needs no weights)",
    )
    parser.add_argument("--out", required=True, help="output JSON path")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = HarvestConfig(
            video=Path(args.video),
            backend=args.backend,
            stride=args.stride,
            confidence_floor=args.confidence_floor,
        )
        segmenter = make_segmenter(args.segmenter)
        document = harvest(config, segmenter)
    except (HarvestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(document, sort_keys=True, indent=1) + "\n")
    print(f"wrote {len(document['frames'])} frames to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
