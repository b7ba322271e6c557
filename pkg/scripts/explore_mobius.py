"""Convexity evidence for Mobius compositions over a grid of alpha and q."""

import argparse
import cmath

from qberezin import operators as O
from qberezin.geometry import SampleGrid, convexity_midpoint_test, sample_range


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--radii", type=float, nargs="+", default=[0.1, 0.3, 0.5, 0.7])
    p.add_argument("--phases", type=int, default=4)
    p.add_argument("--q", type=float, nargs="+", default=[0.3, 0.5, 0.8])
    p.add_argument("--grid-radial", type=int, default=150)
    p.add_argument("--grid-angular", type=int, default=300)
    p.add_argument("--seed", type=int, default=42)
    args = p.parse_args()
    for rho in args.radii:
        for k in range(args.phases):
            alpha = rho * cmath.exp(2j * cmath.pi * k / args.phases)
            for q in args.q:
                cloud = sample_range(O.CompositionMobius(alpha), SampleGrid(q, args.grid_radial, args.grid_angular))
                v = convexity_midpoint_test(cloud, seed=args.seed)
                verdict = "convex" if v.convex else f"witness d={v.distance:.4f}"
                print(f"alpha={alpha.real:+.3f}{alpha.imag:+.3f}i q={q:.2f} res={cloud.resolution:.4f} {verdict}")


if __name__ == "__main__":
    main()
