"""Vectorized golden-section search: many independent 1-D problems at once."""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(fn, lo, hi, iters: int = 80):
    """Minimize fn elementwise on [lo, hi]; fn maps an array of abscissae to values.

    Returns (x, fn(x)).  Each problem is assumed unimodal on its bracket.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - INV_PHI * (b - a)
        new_d = a + INV_PHI * (b - a)
        # one of the two interior points carries over; fn is cheap so recompute both
        c, d = new_c, new_d
        fc, fd = fn(c), fn(d)
    x = np.where(fc < fd, c, d)
    return x, np.minimum(fc, fd)
