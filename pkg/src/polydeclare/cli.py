"""Command-line interface.

Subcommands mirror the pipeline stages: ``train`` runs everything,
``discretize`` + ``mine`` split the same work at the polyadic-log boundary,
``eval`` scores a model's held-out segments, ``explain`` prints the
per-class clause formulas.  Validation failures exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import PolyDeclareError
from .pipeline import (
    FORMATS,
    PipelineConfig,
    bundle_bytes,
    load_bundle,
    run_discretize,
    run_eval,
    run_explain,
    run_mine,
    run_train,
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, default=1e-4,
                        help="steadiness threshold for discretization (default 1e-4)")
    parser.add_argument("--theta", type=float, default=0.0,
                        help="itemset support threshold in [0, 1] (default 0)")
    parser.add_argument("--max-depth", type=int, default=5,
                        help="decision-tree depth cap (default 5)")
    parser.add_argument("--split", type=float, default=0.7, dest="split",
                        help="training fraction of each class's segments (default 0.7)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the stratified splits (default 0)")


def _add_io_flags(parser: argparse.ArgumentParser, out_help: str) -> None:
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker threads for feature extraction (default 1)")
    parser.add_argument("--format", choices=FORMATS, default="long_csv",
                        help="dataset encoding (default long_csv)")
    parser.add_argument("--out", type=Path, default=None, help=out_help)


def _config(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(
        epsilon=args.epsilon,
        theta=args.theta,
        max_depth=args.max_depth,
        train_fraction=args.split,
        seed=args.seed,
        jobs=args.jobs,
        format=args.format,
    )


def _emit(payload: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(payload + b"\n")
        sys.stdout.buffer.flush()
    else:
        out.write_bytes(payload)


def _emit_timings(timings: dict) -> None:
    print(json.dumps({"timings": timings}, sort_keys=True), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polydeclare",
        description="Trend-constituent specification mining for time-series classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model bundle from a dataset")
    p_train.add_argument("dataset", type=Path)
    _add_config_flags(p_train)
    _add_io_flags(p_train, "write the model bundle here (default: stdout)")

    p_disc = sub.add_parser("discretize", help="emit the polyadic event log of a dataset")
    p_disc.add_argument("dataset", type=Path)
    _add_config_flags(p_disc)
    _add_io_flags(p_disc, "write the log JSON here (default: stdout)")

    p_mine = sub.add_parser("mine", help="train a model bundle from a polyadic log")
    p_mine.add_argument("log", type=Path)
    _add_config_flags(p_mine)
    _add_io_flags(p_mine, "write the model bundle here (default: stdout)")

    p_eval = sub.add_parser("eval", help="score a model on its held-out segments")
    p_eval.add_argument("model", type=Path)
    p_eval.add_argument("dataset", type=Path)
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.add_argument("--format", choices=FORMATS, default="long_csv")
    p_eval.add_argument("--out", type=Path, default=None,
                        help="also write the metrics JSON here")

    p_explain = sub.add_parser("explain", help="print per-class clause formulas")
    p_explain.add_argument("model", type=Path)
    p_explain.add_argument("--out", type=Path, default=None,
                           help="write the explanation text here instead of stdout")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            bundle, timings = run_train(args.dataset, _config(args))
            _emit_timings(timings)
            _emit(bundle_bytes(bundle), args.out)
        elif args.command == "discretize":
            payload, timings = run_discretize(args.dataset, _config(args))
            _emit_timings(timings)
            _emit(payload, args.out)
        elif args.command == "mine":
            bundle, timings = run_mine(args.log.read_bytes(), _config(args))
            _emit_timings(timings)
            _emit(bundle_bytes(bundle), args.out)
        elif args.command == "eval":
            bundle = load_bundle(args.model.read_bytes())
            metrics = run_eval(bundle, args.dataset, args.format, jobs=args.jobs)
            text = json.dumps(metrics, sort_keys=True, indent=2)
            print(text)
            if args.out is not None:
                args.out.write_text(text + "\n", encoding="utf-8")
        elif args.command == "explain":
            bundle = load_bundle(args.model.read_bytes())
            text = run_explain(bundle)
            if args.out is None:
                print(text)
            else:
                args.out.write_text(text + "\n", encoding="utf-8")
    except PolyDeclareError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
