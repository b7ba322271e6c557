"""Parameter sets for the six reference figures."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .. import laws as L
from .. import operators as O
from ..geometry.sampling import SampleGrid, sample_range
from ..serialization import describe

FIGURE_IDS = (1, 2, 3, 4, 5, 6)


@dataclass(frozen=True)
class Panel:
    filename: str
    title: str
    clouds: tuple  # (label, PointCloud) pairs


def _grid(q, radial, angular, r_max, schedule):
    return SampleGrid(q, radial, angular, r_max, schedule, True)


def _q_sweep(op, name, radial, angular, r_max, schedule):
    clouds = tuple(
        (f"q = {q:g}", sample_range(op, _grid(q, radial, angular, r_max, schedule))) for q in (0.2, 0.5, 0.8, 1.0)
    )
    return [Panel(f"{name}.svg", f"{describe(op)}, q in {{0.2, 0.5, 0.8, 1}}", clouds)]


def figure_panels(fig_id: int, radial=400, angular=720, r_max=0.995, schedule="r"):
    if fig_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {fig_id}; expected one of {FIGURE_IDS}")
    if fig_id == 1:
        return _q_sweep(O.DiagonalGeneral(L.PowersOfI()), "figure1", radial, angular, r_max, schedule)
    if fig_id == 5:
        return _q_sweep(O.CompositionLinear(1j * math.pi / 4), "figure5", radial, angular, r_max, schedule)
    if fig_id == 2:
        panels = []
        for k in (1, 2, 3):
            op = O.MultPoly(tuple([1 + 1j] * (k + 1)))
            cloud = sample_range(op, _grid(0.8, radial, angular, r_max, schedule))
            panels.append(Panel(f"figure2_k{k}.svg", f"M_p, p = (1+i)(1+...+z^{k}), q = 0.8", (("k", cloud),)))
        return panels
    if fig_id in (3, 4):
        q = 0.4 if fig_id == 3 else 0.8
        cloud = sample_range(O.ToeplitzTwoCos(), _grid(q, radial, angular, r_max, schedule))
        names = (("plus", "Gamma_plus"), ("minus", "Gamma_minus"), ("circle", "circle"))
        return [
            Panel(f"figure{fig_id}_{tag}.svg", f"toeplitz_two_cos, {tag}, q = {q:g}", ((tag, cloud.of_branch(b)),))
            for b, tag in names
        ]
    op = O.CompositionMobius(-0.5)
    cloud = sample_range(op, _grid(0.5, radial, angular, r_max, schedule))
    return [
        Panel(f"figure6_{tag}.svg", f"{describe(op)}, {tag}, q = 0.5", ((tag, cloud.of_branch(b)),))
        for b, tag in (("plus", "Delta_plus"), ("minus", "Delta_minus"))
    ]
