"""Numerical shape tests on point clouds: convexity, symmetry, rotation, Hausdorff."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DegenerateCloudError
from .sampling import PointCloud

WITNESS_FACTOR = 10.0
DEFAULT_SEED = 42
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ConvexWithinTolerance:
    trials: int
    max_distance: float
    threshold: float

    convex = True


@dataclass(frozen=True)
class NonconvexWitness:
    u: complex
    v: complex
    midpoint: complex
    distance: float
    threshold: float

    convex = False


@dataclass(frozen=True)
class GeometryReport:
    convexity: ConvexWithinTolerance | NonconvexWitness | None
    symmetry_defect: float
    rotation_defect: float
    berq_estimate: float
    closed_form_deviation: float | None
    resolution: float


def _xy(values) -> np.ndarray:
    v = np.asarray(values, dtype=complex).ravel()
    return np.column_stack([v.real, v.imag])


def _values(x) -> np.ndarray:
    return x.values if isinstance(x, PointCloud) else np.atleast_1d(np.asarray(x, dtype=complex))


class _FarthestQuery:
    """Exact max over queries of the nearest-sample distance.

    Queries far from a curve-like sample set are slow in a kd-tree, so a coarse
    tree of one representative per grid cell bounds every distance first and only
    queries that can still attain the maximum go to the full tree.
    """

    CELLS = 256

    def __init__(self, xy: np.ndarray):
        self.xy = xy
        self.tree = cKDTree(xy)
        span = float(np.ptp(xy, axis=0).max())
        self.h = span / self.CELLS if span > 0 else 1.0
        _, first = np.unique(np.floor(xy / self.h).astype(np.int64), axis=0, return_index=True)
        self.reps = cKDTree(xy[first])

    def max_distance(self, queries: np.ndarray) -> float:
        d, _ = self.tree.query(queries, distance_upper_bound=2.0 * self.h)
        far = ~np.isfinite(d)
        best = float(d[~far].max()) if not far.all() else 0.0
        if not far.any():
            return best
        queries = queries[far]
        coarse, _ = self.reps.query(queries)
        top = float(coarse.max())
        keep = coarse >= max(best, top - self.h * math.sqrt(2.0))
        # every true distance is at most its coarse bound, so capping at top is exact
        d, _ = self.tree.query(queries[keep], distance_upper_bound=np.nextafter(top, np.inf))
        return max(best, float(d.max()))


def directed_hausdorff(a, b) -> float:
    """max over a of the distance to the nearest point of b."""
    va, vb = _values(a), _values(b)
    if len(va) == 0 or len(vb) == 0:
        raise ValueError("Hausdorff distance needs nonempty sets")
    return _FarthestQuery(_xy(vb)).max_distance(_xy(va))


def hausdorff(a, b) -> float:
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def convexity_midpoint_test(cloud: PointCloud, trials: int = 20_000, seed: int = DEFAULT_SEED):
    """Midpoints of random sample pairs should lie near the cloud if its hull is filled.

    Reports the farthest midpoint as a witness when it sits more than
    10 x resolution away from every sample.
    """
    if not np.all(np.isfinite(cloud.values)):
        raise DegenerateCloudError("cloud has non-finite values")
    pts = cloud.unique_xy
    if len(pts) == 1:
        return ConvexWithinTolerance(0, 0.0, 0.0)
    if len(cloud) < 3:
        raise DegenerateCloudError("convexity test needs at least 3 samples")
    res = cloud.resolution
    threshold = WITNESS_FACTOR * res
    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(pts), trials)
    j = rng.integers(0, len(pts), trials)
    mid = 0.5 * (pts[i] + pts[j])
    d, _ = cKDTree(pts).query(mid)
    k = int(np.argmax(d))
    if d[k] > threshold:
        u, v = complex(*pts[i[k]]), complex(*pts[j[k]])
        return NonconvexWitness(u, v, 0.5 * (u + v), float(d[k]), threshold)
    return ConvexWithinTolerance(int(trials), float(d[k]), threshold)


def reflect(values, psi: float = 0.0):
    """Reflection across the line through 0 at angle psi."""
    return np.exp(2j * psi) * np.conj(values)


def symmetry_test(cloud: PointCloud, psi: float = 0.0) -> float:
    return directed_hausdorff(reflect(cloud.values, psi), cloud)


def rotation_angles(samples: int) -> np.ndarray:
    return 2.0 * np.pi * ((GOLDEN * np.arange(1, samples + 1)) % 1.0)


def rotation_test(cloud: PointCloud, samples: int = 16) -> float:
    finder = _FarthestQuery(cloud.unique_xy)
    pts = cloud.unique_xy[:, 0] + 1j * cloud.unique_xy[:, 1]
    return max(finder.max_distance(_xy(np.exp(1j * zeta) * pts)) for zeta in rotation_angles(samples))
