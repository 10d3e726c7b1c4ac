"""Command line entry point: render sweep CSVs to image files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import EmptyInputError, PlotError, SchemaError
from .figures import KINDS, PlotSpec, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102  (argparse contract)
        raise PlotError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="plot",
        description="Render link-simulator sweep CSVs as figures.",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="FILE",
        help="sweep CSV; repeat to overlay several files in one figure",
    )
    parser.add_argument("--out", required=True, metavar="FILE.png")
    parser.add_argument("--title")
    parser.add_argument(
        "--label",
        dest="labels",
        action="append",
        metavar="TEXT",
        help="legend label, one per --in (default: mode/antennas from the file)",
    )
    return parser


def main(argv=None) -> int:
    """Exit 0 on success, 1 on usage errors, 2 on bad input data."""
    try:
        args = build_parser().parse_args(argv)
        spec = PlotSpec(
            inputs=tuple(Path(p) for p in args.inputs),
            kind=args.kind,
            out_path=Path(args.out),
            title=args.title,
            labels=None if args.labels is None else tuple(args.labels),
        )
        fig = render(spec)
        import matplotlib.pyplot as plt

        plt.close(fig)
    except (SchemaError, EmptyInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0
