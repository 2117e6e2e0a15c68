#!/usr/bin/env python3
"""Regenerate every figure data file into an output directory.

Each file is the commented-CSV emitted by `qdistill trace --figure NAME`,
written as <outdir>/<name>.csv. Deterministic, no seeds involved.
"""

import argparse
import pathlib

from qdistill.cli import FIGURE_NAMES, emit_figure_data


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="figures", type=pathlib.Path)
    ap.add_argument("--only", nargs="*", choices=list(FIGURE_NAMES),
                    help="subset of figures (default: all)")
    args = ap.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    for name in args.only or FIGURE_NAMES:
        path = args.outdir / f"{name}.csv"
        with open(path, "w") as fh:
            emit_figure_data(name, fh)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
