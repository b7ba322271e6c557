"""Reproducing-kernel algebra of H^2(D) and the constrained-pair solver.

For q in (0, 1] and w1 in the disc, the points w2 with
<k̂_{w1}, k̂_{w2}> = q are

* the circle |w2| = sqrt(1 - q^2) when w1 = 0, and
* the two points w2 = lambda_{+/-} w1 otherwise.

Writing s = sqrt(1 - q^2) and r = |w1|, the radial factors reduce to the
Mobius maps lambda_{+/-} r = (r +/- s) / (1 +/- s r); the solver evaluates
that form because it stays accurate as r -> 0, where lambda itself blows up.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchMismatchError, ConsistencyError, DomainError, NoSolutionError

PAIR_TOL = 1e-10
ROOT_TOL = 1e-12
TWO_PI = 2.0 * math.pi


def one_minus_abs2(w):
    """1 - |w|^2, factored to avoid cancellation near the circle."""
    r = np.abs(w)
    return (1.0 - r) * (1.0 + r)


@dataclass(frozen=True)
class DiskPoint:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not abs(v) < 1.0:
            raise DomainError(f"{v} is not inside the open unit disc")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class QParam:
    q: float

    def __post_init__(self):
        q = float(self.q)
        if not 0.0 < q <= 1.0:
            raise DomainError(f"q must lie in (0, 1], got {q}")
        object.__setattr__(self, "q", q)

    def __float__(self):
        return self.q


def as_point(w) -> complex:
    return w.value if isinstance(w, DiskPoint) else DiskPoint(w).value


def as_q(q) -> float:
    return q.q if isinstance(q, QParam) else QParam(q).q


def circle_radius(q) -> float:
    """Radius sqrt(1 - q^2) of the solution circle for w1 = 0."""
    q = as_q(q)
    return 0.0 if q == 1.0 else math.sqrt((1.0 - q) * (1.0 + q))


@dataclass(frozen=True)
class PairBranch:
    kind: str
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("plus", "minus", "circle"):
            raise ValueError(f"unknown branch kind {self.kind!r}")
        if self.kind == "circle":
            if self.theta is None:
                raise ValueError("circle branch needs a phase")
            object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        elif self.theta is not None:
            raise ValueError("only the circle branch carries a phase")

    @classmethod
    def circle(cls, theta: float) -> "PairBranch":
        return cls("circle", theta)

    @property
    def sign(self) -> int:
        return {"plus": 1, "minus": -1}[self.kind]


PLUS = PairBranch("plus")
MINUS = PairBranch("minus")


def kernel_inner(w1, w2) -> complex:
    """<k̂_{w1}, k̂_{w2}> = sqrt((1-|w1|^2)(1-|w2|^2)) / (1 - conj(w1) w2)."""
    w1, w2 = as_point(w1), as_point(w2)
    num = math.sqrt(one_minus_abs2(w1) * one_minus_abs2(w2))
    return num / (1.0 - w1.conjugate() * w2)


def kernel_inner_array(w1, w2):
    """Vectorized kernel_inner without domain checks."""
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    return np.sqrt(one_minus_abs2(w1) * one_minus_abs2(w2)) / (1.0 - np.conj(w1) * w2)


def normalized_kernel_coeffs(w, N: int) -> np.ndarray:
    """Taylor coefficients 0..N of k̂_w, i.e. sqrt(1-|w|^2) conj(w)^n."""
    w = as_point(w)
    if N < 0:
        raise ValueError("N must be non-negative")
    powers = np.power(w.conjugate(), np.arange(N + 1))
    return math.sqrt(one_minus_abs2(w)) * powers


@dataclass(frozen=True)
class TInterval:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def __contains__(self, t) -> bool:
        above = t >= self.lo if self.lo_closed else t > self.lo
        below = t <= self.hi if self.hi_closed else t < self.hi
        return bool(above and below)


def t_range(q) -> TInterval:
    q = as_q(q)
    if q == 1.0:
        return TInterval(0.0, 1.0, False, False)
    return TInterval((q - 1.0) / (q + 1.0), 1.0, True, False)


def minus_minimizer(q) -> float:
    """Radius sqrt((1-q)/(1+q)) where t on the minus branch is smallest."""
    q = as_q(q)
    return math.sqrt((1.0 - q) / (1.0 + q))


def pair_lambda(q, r: float) -> tuple[float, float]:
    q = as_q(q)
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    if q == 1.0:
        return 1.0, 1.0
    s = circle_radius(q)
    den = r * (1.0 - s * s * r * r)
    return (r * q * q + (1.0 - r * r) * s) / den, (r * q * q - (1.0 - r * r) * s) / den


def branch_factor(q, r, sign: int):
    """lambda_{+/-}(r) * r, evaluated in the stable Mobius form."""
    s = circle_radius(q)
    r = np.asarray(r, dtype=float)
    return (r + sign * s) / (1.0 + sign * s * r)


def t_of_radius(q, r, sign: int):
    """t = lambda_{+/-}(r) r^2 as a function of the radius."""
    return np.asarray(r, dtype=float) * branch_factor(q, r, sign)


@dataclass(frozen=True)
class ConstrainedPair:
    w1: complex
    w2: complex
    q: float
    branch: PairBranch

    def __post_init__(self):
        w1, w2 = as_point(self.w1), as_point(self.w2)
        q = as_q(self.q)
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "q", q)
        residual = abs(kernel_inner(w1, w2) - q)
        if residual > PAIR_TOL:
            raise ConsistencyError(f"pair residual {residual:.3e} exceeds {PAIR_TOL}")
        c = w1.conjugate() * w2
        if w1 != 0 and abs(c.imag) > PAIR_TOL:
            raise ConsistencyError(f"conj(w1) w2 has imaginary part {c.imag:.3e}")
        lhs = math.sqrt(one_minus_abs2(w1) * one_minus_abs2(w2))
        if abs(lhs - q * (1.0 - c)) > PAIR_TOL:
            raise ConsistencyError("pair violates sqrt((1-|w1|^2)(1-|w2|^2)) = q(1 - conj(w1) w2)")

    @property
    def residual(self) -> float:
        return abs(kernel_inner(self.w1, self.w2) - self.q)

    def swapped(self) -> "ConstrainedPair":
        """The pair (w2, w1); valid because q is real."""
        return ConstrainedPair(self.w2, self.w1, self.q, classify_branch(self.q, self.w2, self.w1))


def classify_branch(q, w1: complex, w2: complex) -> PairBranch:
    if w1 == 0:
        return PairBranch.circle(cmath.phase(w2) if w2 != 0 else 0.0)
    r = abs(w1)
    unit = w1 / r
    plus = abs(branch_factor(q, r, 1) * unit - w2)
    minus = abs(branch_factor(q, r, -1) * unit - w2)
    return PLUS if plus <= minus else MINUS


def solve_pairs(q, w1, branch: PairBranch) -> ConstrainedPair:
    q = as_q(q)
    w1 = as_point(w1)
    if branch.kind == "circle":
        if w1 != 0:
            raise BranchMismatchError("circle branch requires w1 = 0")
        w2 = circle_radius(q) * cmath.exp(1j * branch.theta)
    elif w1 == 0:
        raise BranchMismatchError("w1 = 0 requires the circle branch")
    elif q == 1.0:
        w2 = w1
    else:
        r = abs(w1)
        w2 = complex(branch_factor(q, r, branch.sign)) * (w1 / r)
    return ConstrainedPair(w1, w2, q, branch)


def t_of_pair(pair: ConstrainedPair) -> float:
    c = pair.w1.conjugate() * pair.w2
    if abs(c.imag) > PAIR_TOL:
        raise ConsistencyError(f"conj(w1) w2 = {c} is not real")
    return c.real


def radius_for_t(q, t: float, branch: PairBranch, larger: bool = False) -> float:
    """Radius r with lambda(q, r) r^2 = t on the given branch.

    On the minus branch t first decreases to its minimum at
    sqrt((1-q)/(1+q)) and then increases towards 1; values of t between the
    minimum and 0 are hit twice and the smaller root is returned unless
    ``larger`` is set.
    """
    q = as_q(q)
    if branch.kind == "circle":
        raise BranchMismatchError("radius_for_t needs the plus or minus branch")
    sign = branch.sign
    if q == 1.0 or sign == 1:
        if not 0.0 < t < 1.0:
            raise NoSolutionError(f"t = {t} is not attained on the {branch.kind} branch")
        if q == 1.0:
            return math.sqrt(t)
    else:
        r_star = minus_minimizer(q)
        t_min = (q - 1.0) / (q + 1.0)
        if not t_min <= t < 1.0:
            raise NoSolutionError(f"t = {t} is not attained on the minus branch")
        if abs(t - t_min) <= ROOT_TOL:
            return r_star

    # r solves r^2 + sign s (1 - t) r - t = 0; roots in cancellation-free form
    s_ = circle_radius(q)
    b = s_ * (1.0 - t)
    root = math.sqrt(max(b * b + 4.0 * t, 0.0))
    if sign == 1:
        r = 2.0 * t / (b + root)
    else:
        big = 0.5 * (b + root)
        r = big if (t >= 0.0 or larger) else -t / big
    if r <= 0.0:
        raise NoSolutionError(f"t = {t} corresponds to a radius below floating-point range")
    return min(r, np.nextafter(1.0, 0.0))
