"""Lower-bound estimates of ber_q(T) = sup |Ber_q(T)|."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ..kernel import as_q, branch_factor, circle_radius, minus_minimizer
from ..operators import OperatorSpec

DEFAULT_BUDGET = 200_000
MIN_RADIAL, MIN_ANGULAR = 16, 32


@dataclass(frozen=True)
class BerqEstimate:
    value: float
    r: float
    theta: float
    branch: str
    coarse: float
    bound: float
    evaluations: int

    def __float__(self):
        return self.value


def _split_budget(budget: int) -> tuple[int, int]:
    na = max(MIN_ANGULAR, min(720, int(math.sqrt(budget / 4))))
    nr = max(MIN_RADIAL, (budget // 2 - na) // (2 * na))
    return nr, na


def coarse_size(nr: int, na: int) -> int:
    return 2 * nr * na + na


def _radii(q, nr):
    extra = [1.0 - 10.0**-k for k in range(2, 10)]
    if q < 1.0:
        extra.append(minus_minimizer(q))
    return np.unique(np.concatenate([np.linspace(0, 1, nr + 1)[1:-1], extra]))


def _moduli(op, q, r, sign, angles):
    """|value| on the (r, theta) grid of one branch, shape (len(r), len(angles))."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    f = r if q == 1.0 else branch_factor(q, r, sign)
    phase = np.exp(1j * np.asarray(angles))[None, :]
    w1 = r[:, None] * phase
    w2 = f[:, None] * phase
    t = np.broadcast_to((r * f)[:, None], w1.shape)
    with np.errstate(all="ignore"):
        v = np.abs(np.asarray(op.closed(q, w1, w2, t), dtype=complex) * np.ones(w1.shape))
    return np.where(np.isfinite(v), v, -np.inf)


def estimate_berq(op: OperatorSpec, q, budget: int = DEFAULT_BUDGET) -> BerqEstimate:
    """Coarse (r, theta, branch) grid, then bounded Brent refinement of the best cell.

    The refinement maximizes r -> max_theta |value| with a full angular
    sweep at every r, then polishes theta.  The result never falls below the
    coarse-grid maximum, which is itself a lower bound on ber_q.
    """
    q = as_q(q)
    nr, na = _split_budget(int(budget))
    if budget < coarse_size(MIN_RADIAL, MIN_ANGULAR):
        raise ValueError(f"budget must be at least {coarse_size(MIN_RADIAL, MIN_ANGULAR)}")
    angles = 2.0 * np.pi * np.arange(na) / na
    radii = _radii(q, nr)
    used = 2 * len(radii) * na + na

    best = (-np.inf, 0.0, 0.0, "plus")
    per_branch = {}
    for name, sign in (("plus", 1), ("minus", -1)):
        m = _moduli(op, q, radii, sign, angles)
        i, j = np.unravel_index(int(np.argmax(m)), m.shape)
        per_branch[name] = (float(m[i, j]), int(i), int(j))
        if m[i, j] > best[0]:
            best = (float(m[i, j]), float(radii[i]), float(angles[j]), name)

    s = circle_radius(q)
    phase = np.exp(1j * angles)
    with np.errstate(all="ignore"):
        circ = np.abs(np.asarray(op.closed(q, np.zeros(na, complex), s * phase, np.zeros(na)), complex) * np.ones(na))
    j = int(np.argmax(circ))
    if circ[j] > best[0]:
        best = (float(circ[j]), 0.0, float(angles[j]), "circle")
    coarse = best[0]

    value, r_best, th_best, name = best
    spare = max(0, (int(budget) - used) // (na + 1))
    dth = 2.0 * np.pi / na

    if name != "circle" and spare > 4:
        sign = 1 if name == "plus" else -1
        _, i, _ = per_branch[name]
        lo = radii[i - 1] if i > 0 else 0.5 * radii[0]
        hi = radii[i + 1] if i + 1 < len(radii) else 0.5 * (1.0 + radii[-1])

        def neg_sweep(r):
            return -float(_moduli(op, q, r, sign, angles).max())

        res = minimize_scalar(neg_sweep, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12, "maxiter": spare // 2})
        used += int(res.nfev) * na
        if -res.fun > value:
            r_best = float(res.x)
            m = _moduli(op, q, r_best, sign, angles)[0]
            value, th_best = float(m.max()), float(angles[int(np.argmax(m))])

        def neg_theta(th):
            return -float(_moduli(op, q, r_best, sign, [th])[0, 0])

        res = minimize_scalar(neg_theta, bounds=(th_best - dth, th_best + dth), method="bounded",
                              options={"xatol": 1e-12, "maxiter": spare // 2})
        used += int(res.nfev)
        if -res.fun > value:
            value, th_best = -float(res.fun), float(res.x) % (2.0 * np.pi)
    elif name == "circle" and spare > 4 and s > 0:

        def neg_circle(th):
            z = np.array([s * np.exp(1j * th)])
            return -float(np.abs(op.closed(q, np.zeros(1, complex), z, np.zeros(1)) * np.ones(1))[0])

        res = minimize_scalar(neg_circle, bounds=(th_best - dth, th_best + dth), method="bounded",
                              options={"xatol": 1e-12, "maxiter": spare})
        used += int(res.nfev)
        if -res.fun > value:
            value, th_best = -float(res.fun), float(res.x) % (2.0 * np.pi)

    return BerqEstimate(value, r_best, th_best, name, coarse, float(op.norm_bound()), used)
