"""Regenerate all six reference figures as SVG."""

import argparse
import sys
from pathlib import Path

from qberezin.cli import main


def parse_args():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", type=Path, default=Path("figures"))
    p.add_argument("--grid-radial", type=int, default=400)
    p.add_argument("--grid-angular", type=int, default=720)
    return p.parse_args()


if __name__ == "__main__":
    args = parse_args()
    grid = ["--grid-radial", str(args.grid_radial), "--grid-angular", str(args.grid_angular)]
    for fid in range(1, 7):
        code = main(["figure", "--id", str(fid), "--outdir", str(args.outdir), *grid])
        if code:
            sys.exit(code)
