"""Tabulate ber_q estimates against closed-form suprema over a q sweep."""

import argparse

import numpy as np

from qberezin import laws as L
from qberezin import operators as O
from qberezin.geometry import closed_form_range, estimate_berq, form_sup_modulus

CASES = {
    "M_z": O.MultPoly((0, 1)),
    "diag |z|^2 monomial k=1": O.DiagonalModSquared(L.MonomialAtK(1)),
    "diag geometric 0.5": O.DiagonalModSquared(L.Geometric(0.5)),
    "rank one (1,2)": O.RankOneMonomial(1, 2),
    "shift geometric 0.5": O.WeightedShift(L.Geometric(0.5)),
    "C_{-z}": O.CompositionLinear(-1),
    "T_{2cos}": O.ToeplitzTwoCos(),
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--budget", type=int, default=50_000)
    p.add_argument("--q", type=float, nargs="+", default=[0.2, 0.5, 0.8, 1.0])
    args = p.parse_args()
    print(f"{'operator':28s} {'q':>5s} {'estimate':>14s} {'closed sup':>14s} {'gap':>10s}")
    for name, op in CASES.items():
        for q in args.q:
            est = estimate_berq(op, q, args.budget).value
            sup = form_sup_modulus(closed_form_range(op, q))
            sup = np.nan if sup is None else sup
            print(f"{name:28s} {q:5.2f} {est:14.10f} {sup:14.10f} {sup - est:10.2e}")


if __name__ == "__main__":
    main()
