"""Command-line entry point.

Subcommands:
    init-ground   fit the ground plane from frame 0 and write plane.json
    run           full detection + tracking pipeline with artifacts
    simulate      render a scenario to a frame directory plus gt.jsonl
    evaluate      recompute metrics.json from a run's artifacts

Every subcommand takes --config <json>, with optional --seed, --out, and
repeatable --set key=value overrides. Exit codes: 0 success, 2 configuration
error, 3 runtime or numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, load_pipeline_config
from .ground import RansacError
from .pipeline import PipelineError, evaluate, init_ground, run_pipeline, simulate
from .pointcloud import FormatError
from .tracker import NumericalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", required=True, help="pipeline configuration JSON file")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="override the output directory")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config field by dotted path, e.g. detection.dbscan.eps=0.05",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eotrack",
        description="Point cloud single-object detection and GP extended-object tracking",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("init-ground", "estimate the ground plane from the first frame"),
        ("run", "run detection and tracking end to end"),
        ("simulate", "render a synthetic scenario to disk"),
        ("evaluate", "recompute metrics from run artifacts"),
    ):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        if name == "simulate":
            p.add_argument(
                "--format", default="pcd_ascii", choices=("pcd_ascii", "ply_ascii", "csv"),
                help="on-disk frame format",
            )
        if name == "evaluate":
            p.add_argument("--run-dir", default=None, help="directory holding the run artifacts")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_pipeline_config(
            args.config, overrides=args.overrides, out_dir=args.out, seed=args.seed
        )
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "init-ground":
            plane = init_ground(config)
            print(f"ground plane: {[round(float(v), 6) for v in plane.as_array()]}")
            print(f"wrote {config.out_dir / 'plane.json'}")
        elif args.command == "run":
            metrics = run_pipeline(config)
            print(f"artifacts written to {config.out_dir}")
            if metrics:
                print(json.dumps(metrics, indent=2))
        elif args.command == "simulate":
            frames_dir = simulate(config, frame_format=args.format)
            print(f"frames written to {frames_dir}")
        elif args.command == "evaluate":
            metrics = evaluate(config, run_dir=args.run_dir)
            print(json.dumps(metrics, indent=2))
    except (RansacError, NumericalError, PipelineError, FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
