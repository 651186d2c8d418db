"""`harness run --data <dir> --seed <n> --out results.csv`"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .balance import BalanceError
from .runner import HarnessError, run_experiments, write_results


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="harness", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    run = sub.add_parser("run", help="train and evaluate all classifier/set cells")
    run.add_argument("--data", type=Path, required=True,
                     help="dataset root: <data>/<project>/<set>/{train,test}.csv")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", type=Path, default=Path("results.csv"))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command != "run":
        parser.print_usage(sys.stderr)
        return 1
    try:
        records = run_experiments(args.data, args.seed)
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_results(records, fh)
    except (HarnessError, BalanceError) as exc:
        print(f"harness: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"harness: i/o error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} ({len(records)} records)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
