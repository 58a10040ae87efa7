"""Standalone entry point: giafigs --in run.csv --fig fig3c --out out.png"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_IDS, FigureInputError, FigureSpec, render


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="giafigs",
        description="Render one figure from simulator trajectory CSVs.")
    ap.add_argument("--in", dest="inputs", action="append", required=True,
                    metavar="CSV",
                    help="input CSV; give twice for fig4 "
                         "(trajectory first, counts second)")
    ap.add_argument("--fig", required=True,
                    help=f"figure id: {', '.join(FIGURE_IDS)}")
    ap.add_argument("--out", required=True,
                    help="output image path (.png or .svg)")
    ap.add_argument("--yscale", choices=("linear", "log"), default=None,
                    help="override the figure's default y-axis scale")
    args = ap.parse_args(argv)
    try:
        out = render(FigureSpec(inputs=tuple(args.inputs), fig_id=args.fig,
                                out=args.out, yscale=args.yscale))
    except FigureInputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
