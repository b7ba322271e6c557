"""Analytic descriptions of Ber_q(T) and distances from clouds to them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from .. import laws as L
from .. import operators as O
from ..errors import UnsupportedFormError
from ..kernel import as_q, branch_factor, circle_radius
from ._optimize import golden_min
from .sampling import PointCloud


@dataclass(frozen=True)
class PointSet:
    values: tuple


@dataclass(frozen=True)
class RealInterval:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval needs lo <= hi")


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float
    boundary_included: bool

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("disc radius must be non-negative")


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float


@dataclass(frozen=True)
class CurveFamily:
    """A named parametric family; ``toeplitz_ellipses`` is the only one in use."""

    family: str
    q: float


@dataclass(frozen=True)
class ScaledDiscImage:
    """The set q * p(D) for a polynomial p."""

    factor: float
    coeffs: tuple


@dataclass(frozen=True)
class Unknown:
    reason: str = ""


# radii used to locate suprema of radial profiles; dense near both ends
_PROFILE_R = np.unique(
    np.concatenate(
        [
            np.linspace(1e-9, 1 - 1e-9, 4001),
            1.0 - np.logspace(-9, -1, 200),
            np.logspace(-9, -1, 100),
        ]
    )
)


def _profile_sup(profile, q) -> tuple[float, bool]:
    """sup over r in (0, 1) and both branches of ``profile(r, f, t)``.

    Returns the supremum and whether it is attained strictly inside the
    parameter range (as opposed to only in the r -> 1 limit).
    """
    best, best_arg = -np.inf, None
    for sign in (1, -1):
        f = _PROFILE_R if q == 1.0 else branch_factor(q, _PROFILE_R, sign)
        vals = profile(_PROFILE_R, f, _PROFILE_R * f)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_arg = float(vals[i]), (sign, i)
    sign, i = best_arg
    lo = _PROFILE_R[max(i - 1, 0)]
    hi = _PROFILE_R[min(i + 1, len(_PROFILE_R) - 1)]

    def neg(r):
        f = r if q == 1.0 else float(branch_factor(q, r, sign))
        return -float(profile(np.array([r]), np.array([f]), np.array([r * f]))[0])

    if hi > lo:
        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        best = max(best, -float(res.fun))
    edge = max(
        float(profile(np.array([1 - 1e-12]), np.array([f1]), np.array([(1 - 1e-12) * f1]))[0])
        for f1 in ([1 - 1e-12] if q == 1.0 else [float(branch_factor(q, 1 - 1e-12, s)) for s in (1, -1)])
    )
    return best, best > edge + 1e-9


def _law_interval(law: L.SequenceLaw, q: float):
    """Range of q(1 - t) G(t) over the attained t-values, for the real laws covered analytically."""
    lo = (q - 1.0) / (q + 1.0)
    if isinstance(law, L.MonomialAtK):
        k = law.k
        if k == 0:
            return RealInterval(0.0, 2.0 * q / (q + 1.0), False, True)
        peak = q / (k + 1) * (k / (k + 1)) ** k
        left = q * (1.0 - lo) * lo**k
        if k % 2:
            return RealInterval(left, peak, True, True)
        return RealInterval(0.0, max(left, peak), True, True)
    if isinstance(law, L.Geometric) and law.beta.imag == 0 and 0 <= law.beta.real < 1:
        b = law.beta.real
        return RealInterval(0.0, 2.0 * q / (q + 1.0 - b * (q - 1.0)), False, True)
    if isinstance(law, L.Alternating):
        a, b = law.a, law.b
        limit = q * (a + b) / 2.0
        at_lo = (q * (a + b) + (a - b)) / 2.0
        if a == b:
            return PointSet((complex(q * a),))
        if a > b:
            return RealInterval(limit, at_lo, False, True)
        return RealInterval(at_lo, limit, True, False)
    return None


def _toeplitz(q):
    if q == 1.0:
        return RealInterval(-2.0, 2.0, False, False)
    return CurveFamily("toeplitz_ellipses", q)


def closed_form_range(op: O.OperatorSpec, q):
    q = as_q(q)
    if isinstance(op, (O.DiagonalModSquared, O.DiagonalGeneral)):
        law = op.weights if isinstance(op, O.DiagonalModSquared) else op.alpha
        form = _law_interval(law, q)
        return form if form is not None else Unknown(f"no closed form for diagonal law {law}")
    if isinstance(op, O.RankOneMonomial):
        n, m = op.n, op.m
        if n == m:
            return _law_interval(L.MonomialAtK(n), q)

        def profile(r, f, t):
            return q * (1.0 - t) * r**n * np.abs(f) ** m

        sup, _ = _profile_sup(profile, q)
        if n == 0:
            sup = max(sup, q * circle_radius(q) ** m)
        return Disc(0j, sup, True)
    if isinstance(op, O.MultPoly):
        c = np.trim_zeros(np.asarray(op.coeffs), "b")
        if len(c) <= 1:
            return PointSet((complex(q * (c[0] if len(c) else 0)),))
        if np.count_nonzero(c[1:]) == 1:
            # c0 + c z^n maps D onto the open disc about c0 of radius |c|
            return Disc(complex(q * c[0]), float(q * abs(c[-1])), False)
        return ScaledDiscImage(q, tuple(complex(v) for v in c))
    if isinstance(op, O.ToeplitzTwoCos):
        return _toeplitz(q)
    if isinstance(op, O.WeightedShift):
        law = op.weights
        if not isinstance(law, (L.Geometric, L.Alternating)):
            return Unknown(f"no closed form for shift weights {law}")

        def profile(r, f, t):
            return np.abs(q * (1.0 - t) * f * law.generating(t))

        sup, attained = _profile_sup(profile, q)
        circle = q * circle_radius(q) * abs(complex(law.values(1)[0]))
        if circle >= sup:
            sup, attained = circle, True
        return Disc(0j, sup, attained)
    if isinstance(op, O.CompositionLinear):
        xi = op.xi
        if xi.imag != 0 or not -1.0 <= xi.real <= 1.0:
            return Unknown("composition with non-real xi")
        if xi.real == 1.0:
            return PointSet((complex(q),))
        x = xi.real
        return RealInterval(0.0, 2.0 * q / (q + 1.0 - x * q + x), False, True)
    if isinstance(op, O.CompositionMobius):
        if op.alpha == 0:
            return PointSet((complex(q),))
        return Unknown("Mobius composition with alpha != 0")
    if isinstance(op, O.UnitaryConjugate):
        return closed_form_range(op.op, q)
    if isinstance(op, O.Affine):
        return _affine_form(closed_form_range(op.op, q), op.a, op.b * q)
    return Unknown(f"no closed form for {type(op).__name__}")


def _affine_form(form, a: complex, shift: complex):
    if isinstance(form, PointSet):
        return PointSet(tuple(a * v + shift for v in form.values))
    if isinstance(form, Disc):
        return Disc(a * form.center + shift, abs(a) * form.radius, form.boundary_included)
    if isinstance(form, Circle):
        return Circle(a * form.center + shift, abs(a) * form.radius)
    if isinstance(form, ScaledDiscImage):
        c = list(a * np.asarray(form.coeffs))
        c[0] += shift / form.factor
        return ScaledDiscImage(form.factor, tuple(c))
    if isinstance(form, RealInterval) and a.imag == 0 and shift.imag == 0 and a.real != 0:
        lo, hi = a.real * form.lo + shift.real, a.real * form.hi + shift.real
        if a.real > 0:
            return RealInterval(lo, hi, form.lo_closed, form.hi_closed)
        return RealInterval(hi, lo, form.hi_closed, form.lo_closed)
    return Unknown("affine image of this form is not tabulated")


@dataclass(frozen=True)
class RangeDeviation:
    """containment: max distance from a sample to the analytic set.

    closed_gap compares sampled extremes with analytic extremes that the
    set attains; open_gap does the same for endpoints that are only limits
    (those cannot close on a grid capped at r_max).
    """

    containment: float
    closed_gap: float
    open_gap: float

    @property
    def total(self) -> float:
        return max(self.containment, self.closed_gap)


def _interval_distance(v, form: RealInterval):
    x = np.clip(v.real, form.lo, form.hi)
    return np.abs(v - x)


def _poly_roots_inside(coeffs, targets, q):
    """Whether q p(z) = v has a root with |z| <= 1, for each target v."""
    c = np.asarray(coeffs, dtype=complex) * q
    d = len(c) - 1
    lead = c[-1]
    inside = np.zeros(len(targets), dtype=bool)
    for start in range(0, len(targets), 4096):
        v = targets[start : start + 4096]
        comp = np.zeros((len(v), d, d), dtype=complex)
        if d > 1:
            comp[:, 1:, :-1] = np.eye(d - 1)
        low = np.broadcast_to(c[:-1], (len(v), d)).copy()
        low[:, 0] -= v
        comp[:, :, -1] = -low / lead
        roots = np.linalg.eigvals(comp)
        inside[start : start + len(v)] = np.min(np.abs(roots), axis=1) <= 1.0 + 1e-12
    return inside


def _scaled_image_distance(v, form: ScaledDiscImage):
    out = np.zeros(len(v))
    inside = _poly_roots_inside(form.coeffs, v, form.factor)
    if np.all(inside):
        return out
    ring = np.exp(2j * np.pi * np.arange(8192) / 8192)
    edge = form.factor * np.polynomial.polynomial.polyval(ring, np.asarray(form.coeffs))
    d, _ = cKDTree(np.column_stack([edge.real, edge.imag])).query(np.column_stack([v.real, v.imag])[~inside])
    out[~inside] = d
    return out


_FAMILY_R = np.unique(np.concatenate([np.linspace(1e-9, 1 - 1e-9, 400), 1.0 - np.logspace(-9, -2, 40)]))


def _ellipse_axes(q, r, sign):
    f = branch_factor(q, r, sign)
    return q * np.abs(f + r), q * np.abs(f - r)


def _ellipse_gap(v, a, b):
    """Distance from v to the ellipse with semi-axes a, b measured along the ray through v."""
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.sqrt((v.real / a) ** 2 + (v.imag / b) ** 2)
        gap = np.abs(v) * np.abs(1.0 - 1.0 / scale)
    return np.where(np.isfinite(gap), gap, np.inf)


def _toeplitz_distance(v, q):
    """Distance from each v to the union of the Toeplitz ellipses and the inner circle."""
    s = circle_radius(q)
    best = np.abs(np.abs(v) - q * s)
    # at r0 = (1 - q)/s the minus ellipse collapses to a segment of the imaginary axis
    half = 2.0 * q * (1.0 - q) / s
    best = np.minimum(best, np.abs(v - 1j * np.clip(v.imag, -half, half)))
    for sign in (1, -1):
        a, b = _ellipse_axes(q, _FAMILY_R, sign)
        for start in range(0, len(v), 2048):
            vv = v[start : start + 2048]
            # sign of the implicit equation, cleared of denominators
            g = (vv.real[:, None] * b) ** 2 + (vv.imag[:, None] * a) ** 2 - (a * b) ** 2
            lo_r = np.full(len(vv), np.nan)
            hi_r = np.full(len(vv), np.nan)
            change = np.signbit(g[:, :-1]) != np.signbit(g[:, 1:])
            has = change.any(axis=1)
            j = np.argmax(change, axis=1)
            lo_r[has] = _FAMILY_R[j[has]]
            hi_r[has] = _FAMILY_R[j[has] + 1]
            glo = g[np.arange(len(vv)), j]
            for _ in range(60):
                mid = 0.5 * (lo_r + hi_r)
                am, bm = _ellipse_axes(q, np.nan_to_num(mid, nan=0.5), sign)
                gm = (vv.real * bm) ** 2 + (vv.imag * am) ** 2 - (am * bm) ** 2
                left = np.signbit(gm) == np.signbit(glo)
                lo_r = np.where(left, mid, lo_r)
                hi_r = np.where(left, hi_r, mid)
            root = 0.5 * (lo_r + hi_r)
            ar, br = _ellipse_axes(q, np.nan_to_num(root, nan=0.5), sign)
            d = np.where(has, _ellipse_gap(vv, ar, br), np.inf)
            # no crossing: take the best grid radius, then polish it
            grid_gap = _ellipse_gap(vv[:, None], a[None, :], b[None, :])
            k = np.argmin(grid_gap, axis=1)
            d = np.minimum(d, grid_gap[np.arange(len(vv)), k])
            todo = np.flatnonzero(~has & (d > 1e-12))
            if len(todo):
                z = vv[todo]
                lo = _FAMILY_R[np.maximum(k[todo] - 1, 0)]
                hi = _FAMILY_R[np.minimum(k[todo] + 1, len(_FAMILY_R) - 1)]
                _, polished = golden_min(lambda r: _ellipse_gap(z, *_ellipse_axes(q, r, sign)), lo, hi)
                d[todo] = np.minimum(d[todo], polished)
            best[start : start + len(vv)] = np.minimum(best[start : start + len(vv)], d)
    return best


def distance_to_form(values, form) -> np.ndarray:
    v = np.atleast_1d(np.asarray(values, dtype=complex))
    if isinstance(form, Unknown):
        raise UnsupportedFormError(f"no closed form to compare against: {form.reason}")
    if isinstance(form, PointSet):
        pts = np.asarray(form.values, dtype=complex)
        return np.min(np.abs(v[:, None] - pts[None, :]), axis=1)
    if isinstance(form, RealInterval):
        return _interval_distance(v, form)
    if isinstance(form, Disc):
        return np.maximum(np.abs(v - form.center) - form.radius, 0.0)
    if isinstance(form, Circle):
        return np.abs(np.abs(v - form.center) - form.radius)
    if isinstance(form, ScaledDiscImage):
        return _scaled_image_distance(v, form)
    if isinstance(form, CurveFamily):
        if form.family != "toeplitz_ellipses":
            raise UnsupportedFormError(f"unknown curve family {form.family!r}")
        return _toeplitz_distance(v, form.q)
    raise UnsupportedFormError(f"unsupported form {form!r}")


def compare_to_closed_form(cloud: PointCloud, form) -> RangeDeviation:
    values = np.unique(np.round(cloud.values, 14))
    containment = float(distance_to_form(values, form).max())
    closed_gap = open_gap = 0.0
    if isinstance(form, RealInterval):
        lo_gap = abs(values.real.min() - form.lo)
        hi_gap = abs(values.real.max() - form.hi)
        closed_gap = max(lo_gap if form.lo_closed else 0.0, hi_gap if form.hi_closed else 0.0)
        open_gap = max(0.0 if form.lo_closed else lo_gap, 0.0 if form.hi_closed else hi_gap)
    elif isinstance(form, Disc):
        gap = abs(form.radius - np.abs(values - form.center).max())
        if form.boundary_included:
            closed_gap = gap
        else:
            open_gap = gap
    elif isinstance(form, PointSet):
        pts = np.asarray(form.values, dtype=complex)
        closed_gap = float(np.min(np.abs(pts[:, None] - values[None, :]), axis=1).max())
    return RangeDeviation(containment, float(closed_gap), float(open_gap))


def form_sup_modulus(form) -> float | None:
    """sup |v| over the analytic set, where it has a direct expression."""
    if isinstance(form, PointSet):
        return max(abs(v) for v in form.values)
    if isinstance(form, RealInterval):
        return max(abs(form.lo), abs(form.hi))
    if isinstance(form, Disc):
        return abs(form.center) + form.radius
    if isinstance(form, Circle):
        return abs(form.center) + form.radius
    if isinstance(form, ScaledDiscImage):
        ring = np.exp(2j * np.pi * np.arange(8192) / 8192)
        return float(form.factor * np.abs(np.polynomial.polynomial.polyval(ring, np.asarray(form.coeffs))).max())
    if isinstance(form, CurveFamily):
        q = form.q
        best = q * circle_radius(q)
        for sign in (1, -1):
            a, b = _ellipse_axes(q, _FAMILY_R, sign)
            best = max(best, float(np.maximum(a, b).max()))
        return best
    return None

