"""Sampling Ber_q(T) on a (radius, phase, branch) grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from ..errors import ConsistencyError, DomainError, EvaluationError
from ..kernel import (
    MINUS,
    PAIR_TOL,
    PLUS,
    PairBranch,
    as_q,
    branch_factor,
    circle_radius,
    kernel_inner_array,
    minus_minimizer,
    radius_for_t,
    t_of_radius,
)
from ..operators import OperatorSpec

BRANCH_NAMES = ("plus", "minus", "circle")
PLUS_CODE, MINUS_CODE, CIRCLE_CODE = 0, 1, 2
SCHEDULES = ("t", "r")


@dataclass(frozen=True)
class SampleGrid:
    q: float
    radial_count: int = 400
    angular_count: int = 720
    r_max: float = 0.995
    radial_schedule: str = "t"
    include_circle_branch: bool = True

    def __post_init__(self):
        object.__setattr__(self, "q", as_q(self.q))
        if int(self.radial_count) < 2:
            raise DomainError("radial_count must be at least 2")
        if int(self.angular_count) < 1:
            raise DomainError("angular_count must be at least 1")
        if not 0.0 < self.r_max < 1.0:
            raise DomainError("r_max must lie in (0, 1)")
        if self.radial_schedule not in SCHEDULES:
            raise DomainError(f"radial_schedule must be one of {SCHEDULES}")
        object.__setattr__(self, "radial_count", int(self.radial_count))
        object.__setattr__(self, "angular_count", int(self.angular_count))

    @property
    def size(self) -> int:
        n = 2 * self.radial_count * self.angular_count
        return n + (self.angular_count if self.include_circle_branch else 0)

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.angular_count) / self.angular_count


def _uniform_t_plus(q, n, r_max):
    t_hi = float(t_of_radius(q, r_max, 1))
    ts = t_hi * np.arange(1, n + 1) / n
    radii = [radius_for_t(q, t, PLUS) for t in ts[:-1]]
    return np.array(radii + [r_max])


def _uniform_t_minus(q, n, r_max):
    if q == 1.0:
        return _uniform_t_plus(q, n, r_max)
    r_star = minus_minimizer(q)
    t_min = (q - 1.0) / (q + 1.0)
    if r_max <= r_star:
        t_end = float(t_of_radius(q, r_max, -1))
        ts = t_end * np.arange(1, n) / n
        return np.array([radius_for_t(q, t, MINUS) for t in ts] + [r_max])
    t_end = float(t_of_radius(q, r_max, -1))
    left, right = -t_min, t_end - t_min
    # n - 2 interior nodes spread by t-length, plus r* and r_max themselves
    u = (left + right) * np.arange(1, n - 1) / (n - 1)
    radii = [r_star, r_max]
    for x in u:
        if x < left:
            radii.append(radius_for_t(q, -x, MINUS))
        elif x > left:
            radii.append(radius_for_t(q, t_min + (x - left), MINUS, larger=True))
    radii = np.unique(np.array(radii))
    while len(radii) < n:
        # ties removed by unique; pad with midpoints of the widest gaps
        i = int(np.argmax(np.diff(np.concatenate([[0.0], radii]))))
        lo = 0.0 if i == 0 else radii[i - 1]
        radii = np.sort(np.append(radii, 0.5 * (lo + radii[i])))
    return radii


def radial_nodes(grid: SampleGrid, sign: int) -> np.ndarray:
    """Increasing radii in (0, r_max] for one branch."""
    n, q, r_max = grid.radial_count, grid.q, grid.r_max
    if grid.radial_schedule == "r":
        return r_max * np.arange(1, n + 1) / n
    return _uniform_t_plus(q, n, r_max) if sign == 1 else _uniform_t_minus(q, n, r_max)


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Samples of Ber_q(T) with the pairs that produced them.

    Arrays are aligned; ``branch`` holds codes 0 (plus), 1 (minus), 2 (circle).
    """

    values: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    branch: np.ndarray
    theta: np.ndarray
    q: float

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_values(cls, values, q=1.0) -> "PointCloud":
        """A bare cloud with no pair data (w1 = w2 = 0), for geometry utilities."""
        v = np.atleast_1d(np.asarray(values, dtype=complex))
        z = np.zeros(len(v), dtype=complex)
        return cls(v, z, z.copy(), np.full(len(v), CIRCLE_CODE), np.zeros(len(v)), float(q))

    def subset(self, mask) -> "PointCloud":
        m = np.asarray(mask)
        return PointCloud(self.values[m], self.w1[m], self.w2[m], self.branch[m], self.theta[m], self.q)

    def of_branch(self, name: str) -> "PointCloud":
        return self.subset(self.branch == BRANCH_NAMES.index(name))

    def with_values(self, values) -> "PointCloud":
        v = np.asarray(values, dtype=complex)
        if v.shape != self.values.shape:
            raise ValueError("replacement values must match the cloud shape")
        return PointCloud(v, self.w1, self.w2, self.branch, self.theta, self.q)

    @property
    def branch_names(self) -> list[str]:
        return [BRANCH_NAMES[c] for c in self.branch]

    def points(self):
        for v, w1, c, th in zip(self.values, self.w1, self.branch, self.theta):
            yield complex(v), complex(w1), BRANCH_NAMES[c], float(th)

    def xy(self) -> np.ndarray:
        return np.column_stack([self.values.real, self.values.imag])

    @cached_property
    def unique_xy(self) -> np.ndarray:
        return np.unique(np.round(self.xy(), 12), axis=0)

    @cached_property
    def resolution(self) -> float:
        """Largest nearest-neighbour distance among distinct sample values."""
        pts = self.unique_xy
        if len(pts) < 2:
            return 0.0
        d, _ = cKDTree(pts).query(pts, k=2)
        return float(d[:, 1].max())


def _pair_arrays(grid: SampleGrid):
    q = grid.q
    angles = grid.angles()
    phase = np.exp(1j * angles)
    nr, na = grid.radial_count, grid.angular_count
    w1 = np.empty((nr, na, 2), dtype=complex)
    w2 = np.empty((nr, na, 2), dtype=complex)
    t = np.empty((nr, na, 2))
    for k, sign in enumerate((1, -1)):
        r = radial_nodes(grid, sign)
        f = r if q == 1.0 else branch_factor(q, r, sign)
        w1[:, :, k] = r[:, None] * phase[None, :]
        w2[:, :, k] = f[:, None] * phase[None, :]
        t[:, :, k] = (r * f)[:, None]
    branch = np.broadcast_to(np.array([PLUS_CODE, MINUS_CODE]), (nr, na, 2))
    theta = np.broadcast_to(angles[None, :, None], (nr, na, 2))
    parts = [w1.ravel(), w2.ravel(), t.ravel(), branch.ravel(), theta.ravel()]
    if grid.include_circle_branch:
        s = circle_radius(q)
        parts[0] = np.concatenate([parts[0], np.zeros(na, dtype=complex)])
        parts[1] = np.concatenate([parts[1], s * phase])
        parts[2] = np.concatenate([parts[2], np.zeros(na)])
        parts[3] = np.concatenate([parts[3], np.full(na, CIRCLE_CODE)])
        parts[4] = np.concatenate([parts[4], angles])
    return tuple(np.ascontiguousarray(p) for p in parts)


def describe_index(grid: SampleGrid, index: int) -> str:
    nr, na = grid.radial_count, grid.angular_count
    body = 2 * nr * na
    if index >= body:
        return f"circle branch, angular index {index - body}"
    i, rest = divmod(index, 2 * na)
    j, k = divmod(rest, 2)
    return f"radial index {i}, angular index {j}, {BRANCH_NAMES[k]} branch"


def grid_pairs(grid: SampleGrid):
    """(w1, w2, t, branch codes, theta) arrays in cloud order, residual-checked."""
    w1, w2, t, branch, theta = _pair_arrays(grid)
    residual = np.abs(kernel_inner_array(w1, w2) - grid.q)
    bad = np.flatnonzero(~(residual <= PAIR_TOL))
    if len(bad):
        i = int(bad[0])
        raise EvaluationError(
            f"pair residual {residual[i]:.3e} at {describe_index(grid, i)} (w1 = {w1[i]}, w2 = {w2[i]})", i
        )
    return w1, w2, t, branch, theta


def sample_range(op: OperatorSpec, grid: SampleGrid) -> PointCloud:
    w1, w2, t, branch, theta = grid_pairs(grid)
    with np.errstate(all="ignore"):
        values = np.asarray(op.closed(grid.q, w1, w2, t), dtype=complex) * np.ones(len(w1))
    bad = np.flatnonzero(~np.isfinite(values))
    if len(bad):
        i = int(bad[0])
        raise EvaluationError(f"non-finite value at {describe_index(grid, i)} (w1 = {w1[i]})", i)
    bound = op.norm_bound()
    over = np.flatnonzero(np.abs(values) > bound + 1e-8)
    if len(over):
        i = int(over[0])
        raise EvaluationError(
            f"|value| = {abs(values[i]):.6g} exceeds norm bound {bound:.6g} at {describe_index(grid, i)}", i
        ) from ConsistencyError("norm bound violated")
    return PointCloud(values, w1, w2, branch, theta, grid.q)


def sample_with(fn, grid: SampleGrid) -> PointCloud:
    """Cloud whose value at each grid pair is ``fn(w1, w2)`` for scalar pairs.

    Used for values that have no vectorized closed form, such as adjoint
    samples from the series oracle.
    """
    w1, w2, t, branch, theta = grid_pairs(grid)
    values = np.empty(len(w1), dtype=complex)
    for i in range(len(w1)):
        try:
            values[i] = fn(complex(w1[i]), complex(w2[i]))
        except (ArithmeticError, ValueError) as exc:
            raise EvaluationError(f"{exc} at {describe_index(grid, i)}", i) from exc
    return PointCloud(values, w1, w2, branch, theta, grid.q)


def pair_branch(code: int, theta: float) -> PairBranch:
    if code == CIRCLE_CODE:
        return PairBranch.circle(theta)
    return PLUS if code == PLUS_CODE else MINUS


def angular_spacing(grid: SampleGrid) -> float:
    return 2.0 * math.pi / grid.angular_count
