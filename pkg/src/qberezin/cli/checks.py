"""The invariant bundle behind ``qberezin check``."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .. import laws as L
from .. import operators as O
from ..errors import TruncationError
from ..geometry import closed_forms as CF
from ..geometry.sampling import PointCloud, SampleGrid, sample_range
from ..geometry.shape import convexity_midpoint_test, rotation_test, symmetry_test
from ..kernel import MINUS, PLUS, PairBranch, kernel_inner_array, solve_pairs
from ..serialization import to_dict

ORACLE_PAIRS = 100
ORACLE_RHO = 0.9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    defect: float | None
    tolerance: float


def oracle_radius(q: float) -> float:
    # small q forces pairs toward the boundary; widen the disc so sampling stays cheap
    return max(ORACLE_RHO, ((1 - q) / (1 + q)) ** 0.25)


def random_pairs(q: float, count: int, seed: int, rho_max: float = ORACLE_RHO):
    """Constrained pairs with max(|w1|, |w2|) <= rho_max, both branches and circle phases."""
    # two points in the closed rho-disc have kernel inner product at least (1 - rho^2)/(1 + rho^2)
    floor = (1 - rho_max**2) / (1 + rho_max**2)
    if q < floor:
        raise ValueError(f"no constrained pairs with moduli <= {rho_max} exist for q = {q} < {floor:.6g}")
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        kind = rng.integers(0, 5)
        theta = float(rng.uniform(0, 2 * np.pi))
        if kind == 0:
            pair = solve_pairs(q, 0.0, PairBranch.circle(theta))
        else:
            r = float(rng.uniform(1e-3, rho_max))
            pair = solve_pairs(q, r * np.exp(1j * theta), PLUS if kind % 2 else MINUS)
        if max(abs(pair.w1), abs(pair.w2)) <= rho_max:
            out.append(pair)
    return out


def _law_is_real(law: L.SequenceLaw) -> bool:
    return bool(np.all(np.asarray(law.values(64)).imag == 0))


def conjugation_symmetric(op: O.OperatorSpec) -> bool:
    """Whether the matrix of op in the monomial basis is real (so the range is conjugation-invariant)."""
    if isinstance(op, (O.RankOneMonomial, O.ToeplitzTwoCos)):
        return True
    if isinstance(op, O.FiniteRank):
        return op.real_coefficients
    if isinstance(op, O.DiagonalModSquared):
        return True
    if isinstance(op, (O.DiagonalGeneral,)):
        return _law_is_real(op.alpha)
    if isinstance(op, O.WeightedShift):
        return _law_is_real(op.weights)
    if isinstance(op, O.Banded):
        return all(_law_is_real(b) for b in op.bands)
    if isinstance(op, O.MultPoly):
        return all(c.imag == 0 for c in op.coeffs)
    if isinstance(op, O.CompositionLinear):
        return op.xi.imag == 0
    if isinstance(op, O.CompositionMobius):
        return True  # reflected pairs carry the symmetry for every alpha
    if isinstance(op, O.Affine):
        return op.a.imag == 0 and op.b.imag == 0 and conjugation_symmetric(op.op)
    return False


def rotation_invariant(op: O.OperatorSpec) -> bool:
    if isinstance(op, O.RankOneMonomial):
        return op.n != op.m
    if isinstance(op, O.WeightedShift):
        return True
    if isinstance(op, O.MultPoly):
        c = np.asarray(op.coeffs)
        return c[0] == 0 and np.count_nonzero(c) == 1
    if isinstance(op, O.UnitaryConjugate):
        return rotation_invariant(op.op)
    return False


def form_description(form) -> dict:
    out = {"variant": type(form).__name__}
    for k, v in asdict(form).items():
        if isinstance(v, complex):
            v = [v.real, v.imag]
        elif isinstance(v, tuple):
            v = [[complex(x).real, complex(x).imag] for x in v]
        out[k] = v
    return out


def run_checks(op: O.OperatorSpec, grid: SampleGrid, seed: int = 42, cloud: PointCloud | None = None):
    q = grid.q
    cloud = sample_range(op, grid) if cloud is None else cloud
    res = cloud.resolution
    checks: list[Check] = []

    residual = float(np.abs(kernel_inner_array(cloud.w1, cloud.w2) - q).max())
    checks.append(Check("pair_residual", residual <= 1e-10, residual, 1e-10))

    # oracle equivalence on independent random pairs
    worst = 0.0
    try:
        for pair in random_pairs(q, ORACLE_PAIRS, seed, oracle_radius(q)):
            a = O.berezin_value_closed(op, pair).value
            b = O.berezin_value_series(op, pair).value
            worst = max(worst, abs(a - b))
        checks.append(Check("oracle_equivalence", worst <= 1e-8, worst, 1e-8))
    except TruncationError:
        checks.append(Check("oracle_equivalence", False, None, 1e-8))

    bound = op.norm_bound()
    top = float(np.abs(cloud.values).max())
    checks.append(Check("norm_bound", top <= bound + 1e-8, max(0.0, top - bound), 1e-8))

    if conjugation_symmetric(op):
        d = symmetry_test(cloud)
        checks.append(Check("real_axis_symmetry", d <= 2 * res, d, 2 * res))
    if rotation_invariant(op):
        d = rotation_test(cloud)
        checks.append(Check("rotation_invariance", d <= 2 * res, d, 2 * res))

    form = CF.closed_form_range(op, q)
    summary = {"sampled_sup": top, "closed_form": form_description(form), "closed_form_sup": None}
    if not isinstance(form, CF.Unknown):
        dev = CF.compare_to_closed_form(cloud, form)
        checks.append(Check("closed_form_containment", dev.containment <= 1e-9, dev.containment, 1e-9))
        checks.append(Check("closed_form_extremes", dev.closed_gap <= max(res, 1e-9), dev.closed_gap,
                            max(res, 1e-9)))
        summary["closed_form_sup"] = CF.form_sup_modulus(form)
        summary["open_endpoint_gap"] = dev.open_gap
        if isinstance(form, (CF.PointSet, CF.RealInterval, CF.Disc)) and len(cloud.unique_xy) >= 1:
            verdict = convexity_midpoint_test(cloud, seed=seed)
            d = float(getattr(verdict, "max_distance", getattr(verdict, "distance", 0.0)))
            checks.append(Check("convexity", bool(verdict.convex), d, float(verdict.threshold)))

    report = {
        "op": to_dict(op),
        "q": q,
        "grid": asdict(grid),
        "seed": seed,
        "resolution": res,
        "checks": [asdict(c) for c in checks],
        "passed": all(c.passed for c in checks),
    }
    report.update(summary)
    return report
