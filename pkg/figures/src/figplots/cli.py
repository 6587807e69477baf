"""Figure-rendering script: figplot --in data.csv --out figure.png --kind line."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureRecipe, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplot", description="Render a figure from a simulator CSV dataset"
    )
    parser.add_argument("--in", dest="source", required=True, help="input CSV path")
    parser.add_argument("--out", dest="output", required=True, help="output image path")
    parser.add_argument("--kind", choices=KINDS, required=True, help="figure kind")
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    recipe = FigureRecipe(
        source=args.source,
        kind=args.kind,
        output=args.output,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        title=args.title,
        dpi=args.dpi,
    )
    try:
        path = render(recipe)
    except (OSError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
