"""plot --csv <file> --kind <lines|heatmap> --out <png/svg>"""

import argparse
import sys

import matplotlib.pyplot as plt

from .figures import FigureSpec, PlotError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render a simulator CSV into a figure.")
    parser.add_argument("--csv", required=True, help="input CSV artifact")
    parser.add_argument("--kind", required=True, choices=("lines", "heatmap"))
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--xlabel", help="override the x axis label")
    parser.add_argument("--ylabel", help="override the y axis label")
    args = parser.parse_args(argv)
    spec = FigureSpec(csv_path=args.csv, figure_kind=args.kind,
                      out_image=args.out, x_label=args.xlabel,
                      y_label=args.ylabel)
    try:
        fig = render(spec)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
