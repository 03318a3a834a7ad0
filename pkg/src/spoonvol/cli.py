"""Command-line surface: estimate, eval, synth.

Exit codes: 0 success, 2 input error, 3 no active key-frames in any video.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import InterchangeError, MissingGroundTruth, SpoonvolError
from .filtering import evaluate, format_report_table, report_to_json
from .interchange import dump_json, load_video
from .pipeline import (
    PipelineConfig,
    estimate_video,
    prediction_from_result_json,
    run_manifest,
    video_result_to_json,
)
from .synth import (
    CorruptionSpec,
    FaceSpec,
    FoodSpec,
    SceneSpec,
    SpoonSpec,
    ground_truth_to_json,
    reference_suite,
    render_video,
)
from .volume import ShapeModel, VolumeConstants

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_NO_ACTIVE_FRAMES = 3


def _is_video_json(path: Path) -> bool:
    # skip the sidecars synth writes next to its videos
    return not path.name.endswith(".truth.json") and path.name != "ground_truth.json"


def _collect_inputs(paths: Sequence[str]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(q for q in sorted(p.glob("*.json")) if _is_video_json(q))
        else:
            files.append(p)
    return files


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    config = PipelineConfig()
    if args.config:
        config = PipelineConfig.from_json(json.loads(Path(args.config).read_text()))
    overrides: dict = {}
    if getattr(args, "shape", None):
        overrides["shape"] = ShapeModel(args.shape)
    if getattr(args, "keyframe_threshold", None) is not None:
        overrides["keyframe_threshold"] = args.keyframe_threshold
    if getattr(args, "stride", None) is not None:
        overrides["downsample_stride"] = args.stride
    if getattr(args, "no_filter", False):
        overrides["filter_enabled"] = False
    if overrides:
        config = PipelineConfig.from_json({**config.to_json(), **_jsonify(overrides)})
    return config


def _jsonify(overrides: dict) -> dict:
    out = dict(overrides)
    if isinstance(out.get("shape"), ShapeModel):
        out["shape"] = out["shape"].value
    return out


def cmd_estimate(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    inputs = _collect_inputs(args.inputs)
    if not inputs:
        print("error: no input files", file=sys.stderr)
        return EXIT_INPUT_ERROR
    results = []
    for path in inputs:
        try:
            doc = load_video(path)
        except (InterchangeError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        results.append(estimate_video(doc.video_id, doc.frames, config))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_json = {
        "version": 1,
        "videos": {r.video_id: video_result_to_json(r) for r in results},
    }
    dump_json(results_json, out_dir / "results.json")
    dump_json(
        run_manifest([str(p) for p in inputs], config, results),
        out_dir / "manifest.json",
    )
    for r in results:
        final = "no active key-frames" if r.final_cm3 is None else f"{r.final_cm3:.3f} cm^3"
        print(f"{r.video_id}: {final}")
    if all(r.final_cm3 is None for r in results):
        print("error: no active key-frames in any video", file=sys.stderr)
        return EXIT_NO_ACTIVE_FRAMES
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        results_obj = json.loads(Path(args.results).read_text())
        truths = json.loads(Path(args.truth).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    videos = results_obj.get("videos", {})
    if not videos:
        print("error: results file contains no videos", file=sys.stderr)
        return EXIT_INPUT_ERROR
    predictions = {}
    for video_id, obj in videos.items():
        pred = prediction_from_result_json(obj)
        if pred is not None:
            predictions[video_id] = pred
    if not predictions:
        print("error: no measured videos to evaluate", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        report = evaluate(predictions, truths)
    except (MissingGroundTruth, SpoonvolError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    table = format_report_table(report)
    print(table, end="")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        dump_json(report_to_json(report), out_dir / "eval.json")
        (out_dir / "eval.txt").write_text(table)
    return EXIT_OK


def _scene_spec_from_json(obj: dict, seed_override: Optional[int]) -> SceneSpec:
    kwargs: dict = {}
    for key in ("seed", "frame_count", "fps", "width", "height", "active_start", "active_end"):
        if key in obj:
            kwargs[key] = obj[key]
    if "spoon" in obj:
        kwargs["spoon"] = SpoonSpec(**obj["spoon"])
    if "food" in obj:
        food = dict(obj["food"])
        if "shape" in food:
            food["shape"] = ShapeModel(food["shape"])
        kwargs["food"] = FoodSpec(**food)
    if "face" in obj:
        kwargs["face"] = FaceSpec(**obj["face"])
    if "corruption" in obj:
        kwargs["corruption"] = CorruptionSpec(**obj["corruption"])
    if seed_override is not None:
        kwargs["seed"] = seed_override
    return SceneSpec(**kwargs)


def _write_scene(out_dir: Path, video_id: str, spec: SceneSpec) -> None:
    document, truth = render_video(spec)
    dump_json(document, out_dir / f"{video_id}.json")
    dump_json(ground_truth_to_json(truth), out_dir / f"{video_id}.truth.json")


def cmd_synth(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.reference_suite:
        suite = reference_suite()
        for video_id, spec in suite.items():
            _write_scene(out_dir, video_id, spec)
        dump_json(
            {vid: spec.food.true_volume_cm3 for vid, spec in suite.items()},
            out_dir / "ground_truth.json",
        )
        print(f"wrote {len(suite)} videos to {out_dir}")
        return EXIT_OK
    if not args.spec:
        print("error: provide --spec FILE or --reference-suite", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        obj = json.loads(Path(args.spec).read_text())
        spec = _scene_spec_from_json(obj, args.seed)
    except (OSError, json.JSONDecodeError, TypeError, ValueError, SpoonvolError) as exc:
        print(f"error: bad scene spec: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    video_id = args.name or Path(args.spec).stem
    _write_scene(out_dir, video_id, spec)
    print(f"wrote {video_id} to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spoonvol",
        description="Estimate food volume on utensils from labeled mask streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="run the volume pipeline over mask streams")
    p_est.add_argument("inputs", nargs="+", help="interchange JSON files or directories")
    p_est.add_argument("--shape", choices=[m.value for m in ShapeModel])
    p_est.add_argument("--keyframe-threshold", type=float, dest="keyframe_threshold")
    p_est.add_argument("--stride", type=int)
    p_est.add_argument("--no-filter", action="store_true", dest="no_filter")
    p_est.add_argument("--config", help="JSON file with pipeline configuration")
    p_est.add_argument("--out", required=True, help="output directory")
    p_est.set_defaults(func=cmd_estimate)

    p_eval = sub.add_parser("eval", help="score results against ground truth")
    p_eval.add_argument("results", help="results.json from `estimate`")
    p_eval.add_argument("truth", help="JSON map video_id -> volume_cm3")
    p_eval.add_argument("--out", help="directory for eval.json / eval.txt")
    p_eval.set_defaults(func=cmd_eval)

    p_syn = sub.add_parser("synth", help="render synthetic benchmark videos")
    p_syn.add_argument("--spec", help="scene spec JSON file")
    p_syn.add_argument("--name", help="output video id (default: spec file stem)")
    p_syn.add_argument("--reference-suite", action="store_true", dest="reference_suite")
    p_syn.add_argument("--seed", type=int, help="override the scene's seed")
    p_syn.add_argument("--out", required=True, help="output directory")
    p_syn.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
