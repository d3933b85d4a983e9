"""Script entry point: plot <figure-kind> <csv> -o <image>."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, RenderError, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="plot", description=__doc__)
    ap.add_argument("kind", choices=["exponents", "capacity"])
    ap.add_argument("csv")
    ap.add_argument("-o", "--out", required=True, help="output image path")
    ap.add_argument("-k", "--cloud-k", type=float, action="append", default=None,
                    help="restrict to these K values (repeatable)")
    ap.add_argument("--title", default="")
    args = ap.parse_args(argv)
    try:
        summary = render(PlotSpec(
            csv_path=args.csv, kind=args.kind, out_path=args.out,
            k_values=args.cloud_k, title=args.title,
        ))
    except (RenderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.kind == "exponents":
        print(f"wrote {args.out}: {summary.lower_curves} lower, "
              f"{summary.upper_curves} upper, {summary.correct_curves} correct-decoding "
              f"curves, {summary.asymptotes} asymptotes")
    else:
        print(f"wrote {args.out}: {summary.capacity_points} capacity points")
    return 0


if __name__ == "__main__":
    sys.exit(main())
