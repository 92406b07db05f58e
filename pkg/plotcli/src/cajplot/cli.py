"""Entry point: one figure per invocation.

    cajplot --spec fig3-msad --csv out/fig3-msad.csv --out fig3.svg

Exit codes: 0 on success, 2 when the figure spec or the CSV input is unusable.
"""

import argparse
import sys

from .render import render
from .specs import find_spec


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cajplot",
        description="Render a figure from sweep CSV files, deterministically.",
    )
    parser.add_argument("--spec", required=True, metavar="FIGURE-ID",
                        help="bundled figure spec id (fig3-msad, fig8-ser-k4, ...)")
    parser.add_argument("--csv", required=True, nargs="+", metavar="PATH",
                        help="one or more CSV files in the sweep schema")
    parser.add_argument("--out", required=True, metavar="FILE",
                        help="output SVG path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = find_spec(args.spec)
        render(spec, args.csv, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{spec.id}: wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
