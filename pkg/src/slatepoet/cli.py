"""Command line interface.

    slatepoet serve    --config slate.conf
    slatepoet order    scene.layout.json
    slatepoet simulate poses.json -o scene.layout.json
    slatepoet simulate --grid 3x4 --spacing 100,80 -o scene.layout.json
    slatepoet replay   sessions.jsonl
    slatepoet stats    sessions.jsonl
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .analytics import read_log, render_report
from .backends import make_backend
from .chains import run_chain
from .config import ServiceConfig, load_config
from .errors import SlatePoetError
from .geometry import GeometryConfig, order_markers
from .layoutfile import layout_document, load_layout, load_poses, save_layout
from .simulate import NoiseModel, generate_baseline, generate_grid, synthesize
from .vocabulary import default_vocabulary, layout_to_text, load_vocabulary


def _vocabulary(args):
    if getattr(args, "vocabulary", None):
        return load_vocabulary(args.vocabulary)
    return default_vocabulary()


def cmd_order(args) -> int:
    markers, config = load_layout(args.layout)
    layout = order_markers(markers, config)
    if args.ids:
        for line in layout.lines:
            print(" ".join(line))
    else:
        print(layout_to_text(layout, _vocabulary(args)))
    return 0


def _parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) == 1:
        return float(parts[0]), float(parts[0])
    if len(parts) == 2:
        return float(parts[0]), float(parts[1])
    raise ValueError(f"expected N or N,M, got {text!r}")


def cmd_simulate(args) -> int:
    noise = NoiseModel()
    if args.poses:
        poses, noise = load_poses(args.poses)
    elif args.grid:
        rows, _, cols = args.grid.partition("x")
        word_ids = args.words.split(",") if args.words else None
        poses = generate_grid(int(rows), int(cols), _parse_pair(args.spacing), word_ids=word_ids)
    elif args.baseline:
        count, _, degrees = args.baseline.partition(":")
        word_ids = args.words.split(",") if args.words else None
        poses = generate_baseline(
            int(count),
            math.radians(float(degrees or 0.0)),
            _parse_pair(args.spacing)[0],
            word_ids=word_ids,
        )
    else:
        print("simulate: need a pose file, --grid, or --baseline", file=sys.stderr)
        return 2
    if args.sigma is not None or args.dropout is not None or args.seed is not None:
        noise = NoiseModel(
            corner_jitter_sigma=args.sigma if args.sigma is not None else noise.corner_jitter_sigma,
            dropout_probability=args.dropout if args.dropout is not None else noise.dropout_probability,
            rng_seed=args.seed if args.seed is not None else noise.rng_seed,
        )
    snapshot = synthesize(poses, noise)
    config = GeometryConfig()
    if args.output:
        save_layout(args.output, snapshot.detections, config)
        print(f"wrote {len(snapshot.detections)} markers to {args.output}")
    else:
        json.dump(layout_document(snapshot.detections, config), sys.stdout, indent=2)
        print()
    return 0


def cmd_replay(args) -> int:
    result = read_log(args.log)
    for diag in result.diagnostics:
        print(f"line {diag.line_number}: {diag.message}", file=sys.stderr)
    backend = make_backend(args.backend)
    matches = 0
    for i, record in enumerate(result.records, start=1):
        outcome = run_chain(record.mode, record.poem_text, backend)
        if outcome.stage2_text == record.stage2_text:
            matches += 1
        elif args.verbose:
            print(f"record {i} [{record.mode.value}] differs:")
            print(f"  logged: {record.stage2_text!r}")
            print(f"  replay: {outcome.stage2_text!r}")
    total = len(result.records)
    print(f"replayed {total} records against {backend.identifier}: {matches} matched, {total - matches} differed")
    return 0


def cmd_stats(args) -> int:
    result = read_log(args.log)
    for diag in result.diagnostics:
        print(f"line {diag.line_number}: {diag.message}", file=sys.stderr)
    print(render_report(result.records, _vocabulary(args), top_n=args.top))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config) if args.config else ServiceConfig()
    vocabulary = load_vocabulary(config.vocabulary_path) if config.vocabulary_path else None
    app = create_app(config, vocabulary=vocabulary)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slatepoet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the slate service")
    p.add_argument("--config", help="flat key=value config file")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("order", help="print a layout file in reading order")
    p.add_argument("layout")
    p.add_argument("--vocabulary", help="vocabulary JSONL (default: shipped set)")
    p.add_argument("--ids", action="store_true", help="print word_ids instead of text")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("simulate", help="synthesize detections and emit a layout file")
    p.add_argument("poses", nargs="?", help="pose-list JSON file")
    p.add_argument("--grid", metavar="RxC", help="generate an RxC grid instead")
    p.add_argument("--baseline", metavar="N:DEG", help="generate N tiles along a DEG-degree baseline")
    p.add_argument("--spacing", default="100,80", help="center spacing, X or X,Y")
    p.add_argument("--words", help="comma-separated word_ids for generated tiles")
    p.add_argument("--sigma", type=float, help="corner jitter sigma override")
    p.add_argument("--dropout", type=float, help="dropout probability override")
    p.add_argument("--seed", type=int, help="noise seed override")
    p.add_argument("-o", "--output", help="layout file to write (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="re-run a session log against a backend and diff")
    p.add_argument("log")
    p.add_argument("--backend", default="stub", help="stub | replay[:path] (default stub)")
    p.add_argument("-v", "--verbose", action="store_true", help="print each differing record")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("stats", help="usage report over a session log")
    p.add_argument("log")
    p.add_argument("--vocabulary", help="vocabulary JSONL (default: shipped set)")
    p.add_argument("--top", type=int, default=10, help="top-N word list length")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SlatePoetError, OSError, ValueError) as exc:
        print(f"slatepoet {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
