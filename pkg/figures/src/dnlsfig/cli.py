"""Command-line entry point: ``dnls-fig --kind ... --input ... --out ...``.

Exit codes match the solver CLI's conventions: 0 on success, 1 for
usage/format problems, 3 for I/O failures.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, render
from .formats import FormatError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnls-fig",
        description="Render figures from solver CSV time series and field snapshots.",
    )
    parser.add_argument(
        "--kind",
        required=True,
        choices=KINDS,
        help="figure layout to draw",
    )
    parser.add_argument(
        "--input",
        required=True,
        nargs="+",
        metavar="PATH",
        help="input files: one CSV for timeseries/widths, snapshots otherwise",
    )
    parser.add_argument("--out", required=True, help="output image path (e.g. fig.png)")
    parser.add_argument("--title", default=None, help="optional figure title")
    parser.add_argument(
        "--shared-scale",
        action="store_true",
        help="contour grids: one color scale across all frames instead of per-frame autoscale",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    spec = FigureSpec(
        inputs=tuple(args.input),
        kind=args.kind,
        out=args.out,
        title=args.title,
        shared_scale=args.shared_scale,
    )
    try:
        out = render(spec)
    except (FormatError, ValueError) as exc:
        print(f"dnls-fig: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"dnls-fig: error: {exc}", file=sys.stderr)
        return 3
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
