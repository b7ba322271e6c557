"""q-Berezin ranges and numbers of operators on the Hardy space H^2(D)."""

from . import laws
from .errors import QBerezinError
from .kernel import (
    MINUS,
    PLUS,
    ConstrainedPair,
    PairBranch,
    kernel_inner,
    pair_lambda,
    radius_for_t,
    solve_pairs,
    t_of_pair,
    t_range,
)
from .operators import (
    Affine,
    Banded,
    CompositionLinear,
    CompositionMobius,
    DiagonalGeneral,
    DiagonalModSquared,
    FiniteRank,
    MultPoly,
    RankOneMonomial,
    ToeplitzTwoCos,
    UnitaryConjugate,
    WeightedShift,
    adjoint_value,
    berezin_value_closed,
    berezin_value_series,
)

__version__ = "0.1.0"
