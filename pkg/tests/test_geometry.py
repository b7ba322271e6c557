import cmath
import math

import numpy as np
import pytest

from qberezin import laws as L
from qberezin import operators as O
from qberezin.errors import DegenerateCloudError, DomainError, EvaluationError, UnsupportedFormError
from qberezin.geometry import (
    ConvexWithinTolerance,
    Disc,
    NonconvexWitness,
    PointCloud,
    PointSet,
    RealInterval,
    SampleGrid,
    closed_form_range,
    compare_to_closed_form,
    convexity_midpoint_test,
    estimate_berq,
    hausdorff,
    rotation_test,
    sample_range,
    sample_with,
    symmetry_test,
)
from qberezin.geometry.sampling import radial_nodes
from qberezin.kernel import circle_radius, kernel_inner_array, t_of_radius


def small(q, nr=120, na=240, **kw):
    return SampleGrid(q, nr, na, **kw)


def attained_t(q, n=400001):
    """Dense sample of the t-values conj(w1) w2 reached by constrained pairs (0 via w1 = 0)."""
    lo = (q - 1) / (q + 1) if q < 1 else 0.0
    return np.append(np.linspace(lo, 1 - 1e-7, n), 0.0)


class TestGrid:
    def test_validation(self):
        with pytest.raises(DomainError):
            SampleGrid(0.5, radial_count=1)
        with pytest.raises(DomainError):
            SampleGrid(0.5, angular_count=0)
        with pytest.raises(DomainError):
            SampleGrid(0.5, r_max=1.0)
        with pytest.raises(DomainError):
            SampleGrid(0.5, radial_schedule="log")

    @pytest.mark.parametrize("q", [0.2, 0.5, 1.0])
    def test_uniform_t_plus(self, q):
        g = SampleGrid(q, 50, 4)
        t = t_of_radius(q, radial_nodes(g, 1), 1)
        assert np.allclose(np.diff(t), t[0], atol=1e-12)

    @pytest.mark.parametrize("q", [0.3, 0.7])
    def test_uniform_t_minus_hits_vertex(self, q):
        g = SampleGrid(q, 60, 4)
        r = radial_nodes(g, -1)
        assert len(r) == 60 and np.all(np.diff(r) > 0) and r[-1] == g.r_max
        t = t_of_radius(q, r, -1)
        assert t.min() == pytest.approx((q - 1) / (q + 1), abs=1e-14)

    def test_uniform_r(self):
        g = SampleGrid(0.5, 10, 3, r_max=0.9, radial_schedule="r")
        assert np.allclose(radial_nodes(g, -1), 0.09 * np.arange(1, 11))


class TestSampleRange:
    def test_ordering_and_size(self):
        g = SampleGrid(0.5, 5, 8)
        c = sample_range(O.ToeplitzTwoCos(), g)
        assert len(c) == g.size == 2 * 5 * 8 + 8
        i, j, k = 3, 5, 1
        idx = i * 16 + j * 2 + k
        assert c.branch[idx] == k
        assert cmath.phase(c.w1[idx]) % (2 * math.pi) == pytest.approx(2 * math.pi * j / 8)
        assert np.all(c.branch[-8:] == 2)

    def test_residuals(self):
        c = sample_range(O.ToeplitzTwoCos(), small(0.3))
        assert np.abs(kernel_inner_array(c.w1, c.w2) - 0.3).max() <= 1e-10

    def test_trivial_composition(self):
        for q in (0.2, 0.9):
            assert np.all(sample_range(O.CompositionLinear(1), small(q)).values == q)

    def test_monomial_diagonal_interval(self):
        v = sample_range(O.DiagonalModSquared(L.MonomialAtK(1)), small(0.5)).values
        assert np.all(v.imag == 0)
        assert v.real.min() >= -2 / 9 - 1e-9 and v.real.max() <= 1 / 8 + 1e-9

    def test_mult_z_disc(self):
        v = sample_range(O.MultPoly((0, 1)), small(0.5)).values
        assert np.abs(v).max() <= 0.5 + 1e-9

    def test_error_names_point(self):
        class Blowup(O.ToeplitzTwoCos):
            def closed(self, q, w1, w2, t):
                return np.where(np.abs(w1) > 0.5, np.inf, 0.0)

        with pytest.raises(EvaluationError) as exc:
            sample_range(Blowup(), SampleGrid(0.5, 10, 4, radial_schedule="r"))
        assert exc.value.index is not None and "radial index" in str(exc.value)

    def test_resolution(self):
        c = sample_range(O.MultPoly((0, 1)), small(0.5))
        assert c.resolution > 0
        assert PointCloud.from_values([1.0, 1.0]).resolution == 0

    def test_containment_general_diagonal(self):
        op = O.DiagonalGeneral(L.PowersOfI())
        for q in (0.2, 0.6):
            c = sample_range(op, small(q))
            t = (np.conj(c.w1) * c.w2).real
            M1 = op.alpha.bound()
            cap = q * M1 * np.maximum(1.0, (1 - t) / (1 + t))
            assert np.all(np.abs(c.values) <= cap + 1e-12)
            assert np.abs(c.values).max() <= M1

    def test_banded_containment(self):
        op = O.Banded((L.Geometric(0.5), L.Alternating(1.0, 0.25), L.PowersOfI()))
        total = sum(op.band_bounds)
        for q in (0.3, 0.8, 1.0):
            c = sample_range(op, small(q))
            t = (np.conj(c.w1) * c.w2).real
            assert np.all(np.abs(c.values) < total)
            assert np.all(np.abs(c.values) <= q * total * np.maximum(1, (1 - t) / (1 + t)) + 1e-12)

    @pytest.mark.parametrize("op", [O.CompositionMobius(0.6j), O.FiniteRank([((1, 1), (2, 0, 1))])])
    def test_below_norm_bound(self, op):
        c = sample_range(op, small(0.4))
        assert np.abs(c.values).max() <= op.norm_bound() + 1e-8

    @pytest.mark.parametrize(
        "op", [O.ToeplitzTwoCos(), O.WeightedShift(L.Geometric(0.5)), O.CompositionMobius(-0.3 + 0.2j)]
    )
    def test_q_one_is_berezin_transform(self, op):
        c = sample_range(op, SampleGrid(1.0, 12, 10, r_max=0.9))
        ref = np.array([O.berezin_transform_series(op, w) for w in c.w1])
        assert np.abs(c.values - ref).max() <= 1e-12

    def test_affine_cloud(self):
        base = O.DiagonalGeneral(L.PowersOfI())
        a, b = 1.5 - 2j, 0.25 + 1j
        g = small(0.45)
        lhs = sample_range(O.Affine(base, a, b), g).values
        rhs = a * sample_range(base, g).values + b * 0.45
        assert np.abs(lhs - rhs).max() <= 1e-12


class TestClosedFormRange:
    def test_geometric_example(self):
        f = closed_form_range(O.DiagonalModSquared(L.Geometric(0)), 0.5)
        assert isinstance(f, RealInterval)
        assert (f.lo, f.lo_closed, f.hi_closed) == (0.0, False, True)
        assert f.hi == pytest.approx(2 / 3, abs=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_classical_monomial(self, k):
        f = closed_form_range(O.DiagonalModSquared(L.MonomialAtK(k)), 1.0)
        assert (f.lo, f.lo_closed, f.hi_closed) == (0.0, True, True)
        assert f.hi == pytest.approx((1 / (k + 1)) * (k / (k + 1)) ** k)

    def test_composition_minus_one(self):
        f = closed_form_range(O.CompositionLinear(-1), 0.5)
        t = attained_t(0.5)
        assert f.hi == pytest.approx(1.0) and not f.lo_closed
        assert np.max(0.5 * (1 - t) / (1 + t)) == pytest.approx(f.hi, abs=1e-12)

    @pytest.mark.parametrize("q", [0.1, 0.2, 0.5, 0.8, 1.0])
    @pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
    def test_monomial_against_brute_force(self, q, k):
        t = attained_t(q)
        vals = q * (1 - t) * t**k
        f = closed_form_range(O.DiagonalModSquared(L.MonomialAtK(k)), q)
        assert f.hi == pytest.approx(vals.max(), abs=1e-9)
        if f.lo_closed:
            assert f.lo == pytest.approx(vals.min(), abs=1e-9)
        else:
            assert f.lo <= vals.min() < f.lo + 1e-6

    def test_even_power_small_q(self):
        # for small q the left end of the t-range beats the interior peak
        f = closed_form_range(O.DiagonalModSquared(L.MonomialAtK(2)), 0.2)
        lo = -2 / 3
        assert f.hi == pytest.approx(0.2 * (1 - lo) * lo**2, rel=1e-12)
        assert f.hi > 0.2 / 3 * (2 / 3) ** 2
        t = attained_t(0.2)
        assert f.hi == pytest.approx(np.max(0.2 * (1 - t) * t * t), abs=1e-9)

    @pytest.mark.parametrize("a,b", [(1, 3), (3, 1), (2, 2), (0, 1)])
    @pytest.mark.parametrize("q", [0.3, 0.5, 1.0])
    def test_alternating_against_brute_force(self, a, b, q):
        t = attained_t(q)
        vals = q * (a + b * t) / (1 + t)
        f = closed_form_range(O.DiagonalModSquared(L.Alternating(a, b)), q)
        if a == b:
            assert f == PointSet((complex(q * a),))
            return
        assert f.lo == pytest.approx(vals.min(), abs=1e-6)
        assert f.hi == pytest.approx(vals.max(), abs=1e-6)
        # the endpoint reached at the left end of the t-range is the closed one
        assert (f.hi_closed, f.lo_closed) == ((True, False) if a > b else (False, True))

    @pytest.mark.parametrize("beta", [0.0, 0.3, 0.9])
    @pytest.mark.parametrize("q", [0.25, 0.5, 1.0])
    def test_geometric_against_brute_force(self, beta, q):
        t = attained_t(q)
        f = closed_form_range(O.DiagonalModSquared(L.Geometric(beta)), q)
        assert f.hi == pytest.approx(np.max(q * (1 - t) / (1 - beta * t)), abs=1e-12)

    def test_discs(self):
        d = closed_form_range(O.MultPoly((0, 1)), 0.7)
        assert isinstance(d, Disc) and d.center == 0 and not d.boundary_included
        assert d.radius == pytest.approx(0.7, abs=1e-15)
        f = closed_form_range(O.MultPoly((2, 0, 0, 1j)), 0.5)
        assert f.center == pytest.approx(1.0) and f.radius == pytest.approx(0.5)
        assert type(closed_form_range(O.MultPoly((1, 1, 1)), 0.5)).__name__ == "ScaledDiscImage"

    def test_unknowns(self):
        for op in [O.DiagonalGeneral(L.PowersOfI()), O.Banded((L.MonomialAtK(0),)), O.CompositionMobius(0.2),
                   O.CompositionLinear(0.5j)]:
            assert type(closed_form_range(op, 0.5)).__name__ == "Unknown"
        assert closed_form_range(O.CompositionMobius(0), 0.3) == PointSet((0.3 + 0j,))

    def test_shift_disc_radius(self):
        # radius from a dense (r, branch) profile computed independently
        q = 0.5
        r = np.linspace(1e-6, 1 - 1e-6, 200001)
        s = math.sqrt(1 - q * q)
        best = q * s
        for sign in (1, -1):
            f = (r + sign * s) / (1 + sign * s * r)
            t = r * f
            best = max(best, np.max(q * (1 - t) * np.abs(f) / (1 - 0.5 * t)))
        form = closed_form_range(O.WeightedShift(L.Geometric(0.5)), q)
        assert form.radius == pytest.approx(best, abs=1e-9)


class TestCompare:
    def test_alternating_increasing(self):
        op = O.DiagonalModSquared(L.Alternating(1, 3))
        c = sample_range(op, small(0.5))
        f = closed_form_range(op, 0.5)
        assert np.all(c.values.imag == 0)
        assert f.lo == pytest.approx(0.0, abs=1e-15) and f.hi == pytest.approx(1.0)
        dev = compare_to_closed_form(c, f)
        assert dev.containment <= 1e-9 and dev.closed_gap <= 1e-12

    def test_toeplitz_family(self):
        q = 0.4
        c = sample_range(O.ToeplitzTwoCos(), SampleGrid(q, 60, 90))
        dev = compare_to_closed_form(c, closed_form_range(O.ToeplitzTwoCos(), q))
        assert dev.containment <= 1e-9
        circle = c.of_branch("circle").values
        assert np.allclose(np.abs(circle), 0.4 * math.sqrt(0.84), atol=1e-15)
        assert 0.4 * math.sqrt(0.84) == pytest.approx(0.3666060555964672)

    def test_toeplitz_family_rejects_outside(self):
        from qberezin.geometry import distance_to_form

        d = distance_to_form([0.9, 0.5 + 0.5j], closed_form_range(O.ToeplitzTwoCos(), 0.4))
        assert d[0] == pytest.approx(0.1, abs=1e-6) and d[1] > 0.1

    def test_scaled_image(self):
        q = 0.8
        op = O.MultPoly((1 + 1j, 1 + 1j))
        c = sample_range(op, small(q))
        r = np.linspace(0, 0.999, 300)[:, None]
        z = (r * np.exp(2j * np.pi * np.arange(720) / 720)[None, :]).ravel()
        image = PointCloud.from_values(q * (1 + 1j) * (1 + z))
        assert hausdorff(c, image) <= 2 * c.resolution
        assert compare_to_closed_form(c, closed_form_range(op, q)).containment <= 1e-9

    def test_scaled_image_nonlinear(self):
        op = O.MultPoly((0, 1, 0.5j, 0.2))
        form = closed_form_range(op, 0.6)
        c = sample_range(op, SampleGrid(0.6, 40, 60))
        assert compare_to_closed_form(c, form).containment <= 1e-9

    def test_unknown_rejected(self):
        c = sample_range(O.CompositionMobius(0.3), SampleGrid(0.5, 4, 4))
        with pytest.raises(UnsupportedFormError):
            compare_to_closed_form(c, closed_form_range(O.CompositionMobius(0.3), 0.5))

    @pytest.mark.parametrize(
        "op",
        [O.RankOneMonomial(1, 2), O.DiagonalModSquared(L.MonomialAtK(2)), O.WeightedShift(L.Alternating(1, 0.5))],
    )
    def test_refinement(self, op):
        q = 0.5
        form = closed_form_range(op, q)
        coarse = compare_to_closed_form(sample_range(op, SampleGrid(q, 40, 80)), form)
        fine = compare_to_closed_form(sample_range(op, SampleGrid(q, 80, 160)), form)
        assert fine.containment <= coarse.containment + 1e-12
        assert fine.closed_gap <= coarse.closed_gap + 1e-12


class TestBerq:
    def test_trivial_composition(self):
        assert estimate_berq(O.CompositionLinear(1), 0.37).value == 0.37
        assert estimate_berq(O.CompositionMobius(0), 0.8).value == 0.8

    def test_toeplitz_at_one(self):
        assert estimate_berq(O.ToeplitzTwoCos(), 1.0).value == pytest.approx(2, abs=1e-3)

    def test_monomial(self):
        est = estimate_berq(O.DiagonalModSquared(L.MonomialAtK(1)), 0.5)
        assert est.value == pytest.approx(2 / 9, abs=1e-4)
        assert est.branch == "minus"

    def test_refinement_never_below_coarse(self):
        est = estimate_berq(O.RankOneMonomial(1, 2), 0.5, budget=5000)
        assert est.value >= est.coarse
        form = closed_form_range(O.RankOneMonomial(1, 2), 0.5)
        assert est.value == pytest.approx(form.radius, abs=1e-7)

    def test_budget_floor(self):
        with pytest.raises(ValueError):
            estimate_berq(O.ToeplitzTwoCos(), 0.5, budget=10)

    def test_triangle_inequality(self):
        R = O.DiagonalGeneral(L.Geometric(0.5))
        T = O.DiagonalGeneral(L.PowersOfI())
        RT = O.DiagonalGeneral(L.Combination(((1, L.Geometric(0.5)), (1, L.PowersOfI()))))
        for q in (0.3, 0.7):
            total = estimate_berq(RT, q).value
            assert total <= estimate_berq(R, q).value + estimate_berq(T, q).value + 1e-6


class TestShape:
    def test_constant_cloud_is_convex(self):
        verdict = convexity_midpoint_test(PointCloud.from_values(np.full(10, 0.3 + 0j)))
        assert isinstance(verdict, ConvexWithinTolerance)

    def test_degenerate(self):
        with pytest.raises(DegenerateCloudError):
            convexity_midpoint_test(PointCloud.from_values([0, 1]))
        with pytest.raises(DegenerateCloudError):
            convexity_midpoint_test(PointCloud.from_values([0, np.nan, 1]))

    @pytest.mark.parametrize("op", [O.DiagonalGeneral(L.PowersOfI()), O.CompositionLinear(1j * math.pi / 4)])
    def test_nonconvex_witnesses(self, op):
        c = sample_range(op, small(0.5))
        w = convexity_midpoint_test(c)
        assert isinstance(w, NonconvexWitness)
        assert w.distance > 10 * c.resolution
        assert convexity_midpoint_test(c) == w
        assert w.midpoint == pytest.approx(0.5 * (w.u + w.v))

    def test_disc_passes(self):
        c = sample_range(O.MultPoly((0, 1)), small(0.5))
        assert isinstance(convexity_midpoint_test(c), ConvexWithinTolerance)

    def test_symmetry(self):
        op = O.FiniteRank([((1, -2), (0, 1, 3)), ((0.5,), (1, -1))])
        c = sample_range(op, small(0.5))
        assert symmetry_test(c) <= 2 * c.resolution
        assert symmetry_test(PointCloud.from_values(np.linspace(-1, 2, 50))) == 0
        m = sample_range(O.CompositionMobius(-0.5), small(0.5))
        assert symmetry_test(m, math.pi) <= 2 * m.resolution

    def test_asymmetric_cloud_detected(self):
        c = sample_range(O.DiagonalGeneral(L.PowersOfI()), small(0.5))
        assert symmetry_test(c) > 10 * c.resolution

    @pytest.mark.parametrize("op", [O.RankOneMonomial(1, 2), O.WeightedShift(L.Geometric(0.5))])
    def test_rotation(self, op):
        c = sample_range(op, SampleGrid(0.5, 100, 720))
        assert rotation_test(c) <= 2 * c.resolution
        assert rotation_test(PointCloud.from_values([0j])) == 0

    def test_rotation_detects_non_disc(self):
        c = sample_range(O.ToeplitzTwoCos(), SampleGrid(0.5, 40, 360))
        assert rotation_test(c) > 2 * c.resolution

    def test_hausdorff(self):
        c = sample_range(O.WeightedShift(L.Geometric(0.3)), SampleGrid(0.5, 20, 30))
        assert hausdorff(c, c) == 0
        shifted = PointCloud.from_values(c.values + 0.125)
        assert hausdorff(c, shifted) == pytest.approx(0.125, abs=1e-12) or hausdorff(c, shifted) <= 0.125

    def test_hausdorff_shift_exact(self):
        a = PointCloud.from_values([0, 1, 2])
        assert hausdorff(a, PointCloud.from_values([0.25, 1.25, 2.25])) == pytest.approx(0.25)

    def test_unitary_invariance(self):
        T = O.WeightedShift(L.Geometric(0.3))
        U = O.UnitaryConjugate(T, cmath.exp(1j * math.pi / 3))
        g = SampleGrid(0.5, 100, 720)
        a, b = sample_range(T, g), sample_range(U, g)
        assert hausdorff(a, b) <= 2 * a.resolution

    def test_adjoint_cloud(self):
        op = O.WeightedShift(L.Geometric(0.5))
        g = SampleGrid(0.5, 40, 90, r_max=0.9)
        base = sample_range(op, g)
        star = sample_with(
            lambda w1, w2: O.adjoint_value(op, O.ConstrainedPair(w1, w2, 0.5, O_branch(w1, w2))), g
        )
        conj = base.with_values(np.conj(base.values))
        assert hausdorff(star, conj) <= 2 * max(conj.resolution, star.resolution)


def O_branch(w1, w2):
    from qberezin.kernel import classify_branch

    return classify_branch(0.5, w1, w2)


def test_circle_radius_helper():
    assert circle_radius(0.6) == pytest.approx(0.8)


def test_directed_hausdorff_matches_brute_force(rng):
    from scipy.spatial.distance import cdist

    from qberezin.geometry.shape import directed_hausdorff

    for _ in range(100):
        na, nb = rng.integers(1, 200, 2)
        a = rng.normal(size=na) * rng.uniform(0, 3) + 1j * rng.normal(size=na) * rng.uniform(0, 3)
        b = rng.normal(size=nb) * rng.uniform(0, 3) + 1j * rng.normal(size=nb) * rng.uniform(0, 1e-3)
        ref = cdist(np.c_[a.real, a.imag], np.c_[b.real, b.imag]).min(axis=1).max()
        assert directed_hausdorff(a, b) == pytest.approx(ref, rel=1e-14, abs=1e-300)
