from .berq import BerqEstimate, estimate_berq
from .closed_forms import (
    Circle,
    CurveFamily,
    Disc,
    PointSet,
    RangeDeviation,
    RealInterval,
    ScaledDiscImage,
    Unknown,
    closed_form_range,
    compare_to_closed_form,
    distance_to_form,
    form_sup_modulus,
)
from .sampling import PointCloud, SampleGrid, sample_range, sample_with
from .shape import (
    ConvexWithinTolerance,
    GeometryReport,
    NonconvexWitness,
    convexity_midpoint_test,
    directed_hausdorff,
    hausdorff,
    rotation_test,
    symmetry_test,
)
