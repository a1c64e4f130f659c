"""Render every figure spec in a declarative JSON list.

    d2dplots --figures figures.json --data-dir sweeps/ --out-dir figures/
"""

from __future__ import annotations

import argparse
import sys

from .reader import CsvFormatError
from .render import load_figure_specs, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="d2dplots",
                                     description="render figures from sweep CSVs")
    parser.add_argument("--figures", required=True, help="figure spec JSON file")
    parser.add_argument("--data-dir", default=".", help="directory with sweep CSVs")
    parser.add_argument("--out-dir", default="figures", help="output directory")
    parser.add_argument("--only", default=None, help="render a single figure by name")
    args = parser.parse_args(argv)

    specs = load_figure_specs(args.figures)
    if args.only is not None:
        specs = [s for s in specs if s.name == args.only]
        if not specs:
            print(f"no figure named {args.only!r}", file=sys.stderr)
            return 1
    failures = 0
    for spec in specs:
        try:
            result = render(spec, args.data_dir, args.out_dir)
            print(f"{spec.name}: wrote {result.png_path} and {result.svg_path}")
        except (CsvFormatError, ValueError, OSError) as exc:
            print(f"{spec.name}: {exc}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
