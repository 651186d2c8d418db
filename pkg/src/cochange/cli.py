"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 validation/configuration/parse error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import load_config
from .errors import CochangeError
from .metrics import METRIC_SETS
from . import pipeline


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="project config (JSON)")
    parser.add_argument("--outdir", type=Path, default=None,
                        help="output root (default: config output_dir)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel per-release workers")


def build_parser() -> _Parser:
    parser = _Parser(prog="cochange", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    for name, helptext in [
        ("ingest", "parse the log and write per-release windows"),
        ("graph", "write per-release co-change edge lists"),
        ("metrics", "write the per-(release,file) metrics table"),
        ("correlate", "correlate sctr/cce against defect counts"),
        ("pipeline", "run every stage"),
    ]:
        _add_common(sub.add_parser(name, help=helptext))

    entropy = sub.add_parser("entropy", help="write per-release entropy reports")
    _add_common(entropy)
    entropy.add_argument("--measure", choices=["change", "cochange", "both"], default="both")

    dataset = sub.add_parser("dataset", help="write train/test tables per metric set")
    _add_common(dataset)
    dataset.add_argument("--set", dest="set_id", choices=list(METRIC_SETS), default=None,
                         help="single metric set (default: all three)")

    stats = sub.add_parser("stats", help="Friedman + Nemenyi over a classifier results CSV")
    stats.add_argument("results", type=Path, help="results CSV from the classify harness")
    stats.add_argument("--outdir", type=Path, default=Path("out"))
    stats.add_argument("--alpha", type=float, default=0.05)

    return parser


def _dispatch(args: argparse.Namespace) -> list[Path]:
    if args.command == "stats":
        return pipeline.run_stats(args.results, args.outdir, args.alpha)
    cfg = load_config(args.config)
    if args.jobs < 1:
        raise CochangeError(f"--jobs must be >= 1, got {args.jobs}")
    if args.command == "ingest":
        return pipeline.run_ingest(cfg, args.outdir)
    if args.command == "graph":
        return pipeline.run_graph(cfg, args.outdir, args.jobs)
    if args.command == "entropy":
        measures = ("change", "cochange") if args.measure == "both" else (args.measure,)
        return pipeline.run_entropy(cfg, args.outdir, measures, args.jobs)
    if args.command == "metrics":
        return pipeline.run_metrics(cfg, args.outdir, args.jobs)
    if args.command == "correlate":
        return pipeline.run_correlate(cfg, args.outdir, args.jobs)
    if args.command == "dataset":
        set_ids = (args.set_id,) if args.set_id else METRIC_SETS
        return pipeline.run_dataset(cfg, args.outdir, set_ids, args.jobs)
    if args.command == "pipeline":
        return pipeline.run_pipeline(cfg, args.outdir, args.jobs)
    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    try:
        written = _dispatch(args)
    except CochangeError as exc:
        print(f"cochange {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cochange {args.command}: i/o error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
