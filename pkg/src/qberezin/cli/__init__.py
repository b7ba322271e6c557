"""qberezin command-line interface.

Exit codes: 0 success, 1 failed check, 2 bad arguments, 3 evaluation error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import cmath
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import serialization
from ..errors import ConsistencyError, DomainError, EvaluationError, LengthOverflowError, TruncationError
from ..geometry.berq import DEFAULT_BUDGET, estimate_berq
from ..geometry.sampling import SampleGrid, sample_range
from ..kernel import MINUS, PLUS, PairBranch, as_q, kernel_inner, pair_lambda, solve_pairs, t_of_pair
from ..operators import OperatorSpec
from . import io
from .checks import run_checks
from .figures import FIGURE_IDS, figure_panels

EXIT_OK, EXIT_CHECK, EXIT_ARGS, EXIT_EVAL, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Output:
    kind: str  # csv | svg | report
    path: Path


@dataclass(frozen=True)
class RunConfig:
    op: OperatorSpec
    grid: SampleGrid
    outputs: tuple = field(default_factory=tuple)
    seed: int = 42

    @property
    def q(self) -> float:
        return self.grid.q


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qberezin", description="q-Berezin ranges on H^2(D)")
    sub = p.add_subparsers(dest="command", required=True)

    pairs = sub.add_parser("pairs", help="solve the constraint for one w1")
    pairs.add_argument("--q", type=float, required=True)
    pairs.add_argument("--r", type=float, required=True)
    pairs.add_argument("--theta", type=float, default=0.0)

    def sampling(sp, need_op=True):
        sp.add_argument("--op", type=Path, required=need_op, help="operator spec (JSON file)")
        sp.add_argument("--q", type=float, required=need_op)
        sp.add_argument("--grid-radial", type=int, default=400)
        sp.add_argument("--grid-angular", type=int, default=720)
        sp.add_argument("--r-max", type=float, default=0.995)
        sp.add_argument("--schedule", choices=("t", "r"), default="t")
        sp.add_argument("--seed", type=int, default=42)

    rng = sub.add_parser("range", help="sample Ber_q(T) to CSV / SVG")
    sampling(rng)
    rng.add_argument("--csv", type=Path)
    rng.add_argument("--svg", type=Path)
    rng.add_argument("--report", type=Path)

    chk = sub.add_parser("check", help="run the invariant checks and write a JSON report")
    sampling(chk)
    chk.add_argument("--report", type=Path)

    bq = sub.add_parser("berq", help="estimate ber_q(T)")
    sampling(bq)
    bq.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    fig = sub.add_parser("figure", help="regenerate a reference figure")
    fig.add_argument("--id", type=int, required=True)
    fig.add_argument("--outdir", type=Path, default=Path("."))
    fig.add_argument("--grid-radial", type=int, default=400)
    fig.add_argument("--grid-angular", type=int, default=720)
    fig.add_argument("--r-max", type=float, default=0.995)
    fig.add_argument("--schedule", choices=("t", "r"), default="r")
    return p


def _load_op(path: Path) -> OperatorSpec:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read operator spec {path}: {exc}") from exc
    try:
        return serialization.loads(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"invalid operator spec {path}: {exc}") from exc


def _config(args, outputs=()) -> RunConfig:
    op = _load_op(args.op)
    try:
        grid = SampleGrid(args.q, args.grid_radial, args.grid_angular, args.r_max, args.schedule, True)
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return RunConfig(op, grid, tuple(outputs), args.seed)


def _c(z: complex) -> str:
    return f"{io.fmt(z.real)} {io.fmt(z.imag)}"


def cmd_pairs(args, out) -> int:
    try:
        q = as_q(args.q)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    if not 0.0 <= args.r < 1.0:
        raise UsageError("--r must lie in [0, 1)")
    w1 = args.r * cmath.exp(1j * args.theta)
    print(f"q {io.fmt(q)}", file=out)
    print(f"w1 {_c(w1)}", file=out)
    if args.r == 0.0:
        pair = solve_pairs(q, 0.0, PairBranch.circle(args.theta))
        print("branch circle", file=out)
        print(f"circle_radius {io.fmt(abs(pair.w2))}", file=out)
        print(f"w2 {_c(pair.w2)}", file=out)
        print(f"t {io.fmt(t_of_pair(pair))}", file=out)
        print(f"residual {io.fmt(abs(kernel_inner(pair.w1, pair.w2) - q))}", file=out)
        return EXIT_OK
    lam = pair_lambda(q, args.r)
    print(f"lambda_plus {io.fmt(lam[0])}", file=out)
    print(f"lambda_minus {io.fmt(lam[1])}", file=out)
    print("branch w2_re w2_im t residual", file=out)
    for name, branch in (("plus", PLUS), ("minus", MINUS)):
        pair = solve_pairs(q, w1, branch)
        res = abs(kernel_inner(pair.w1, pair.w2) - q)
        print(f"{name} {_c(pair.w2)} {io.fmt(t_of_pair(pair))} {io.fmt(res)}", file=out)
    return EXIT_OK


def _range_report(cfg: RunConfig, cloud) -> dict:
    v = cloud.values
    return {
        "op": serialization.to_dict(cfg.op),
        "q": cfg.q,
        "points": len(cloud),
        "resolution": cloud.resolution,
        "sup_modulus": float(np.abs(v).max()),
        "bbox": [float(v.real.min()), float(v.imag.min()), float(v.real.max()), float(v.imag.max())],
        "seed": cfg.seed,
    }


def cmd_range(args, out) -> int:
    outputs = [Output(k, getattr(args, k)) for k in ("csv", "svg", "report") if getattr(args, k) is not None]
    if not outputs:
        raise UsageError("range needs at least one of --csv, --svg, --report")
    cfg = _config(args, outputs)
    cloud = sample_range(cfg.op, cfg.grid)
    texts = []
    for o in cfg.outputs:
        if o.kind == "csv":
            texts.append((o.path, io.cloud_csv(cloud)))
        elif o.kind == "svg":
            title = f"{serialization.describe(cfg.op)}, q = {cfg.q:g}"
            texts.append((o.path, io.cloud_svg([("cloud", cloud)], title)))
        else:
            texts.append((o.path, io.json_text(_range_report(cfg, cloud))))
    for path, text in texts:
        io.atomic_write(path, text)
    print(f"{len(cloud)} samples, resolution {cloud.resolution:.3g}", file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    cfg = _config(args)
    report = run_checks(cfg.op, cfg.grid, cfg.seed)
    text = io.json_text(report)
    if args.report is not None:
        io.atomic_write(args.report, text)
    else:
        out.write(text)
    for c in report["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"{status} {c['name']} defect={c['defect']} tol={c['tolerance']}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_CHECK


def cmd_berq(args, out) -> int:
    cfg = _config(args)
    try:
        est = estimate_berq(cfg.op, cfg.q, args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(f"estimate {io.fmt(est.value)}", file=out)
    print(f"r {io.fmt(est.r)}", file=out)
    print(f"theta {io.fmt(est.theta)}", file=out)
    print(f"branch {est.branch}", file=out)
    print(f"norm_bound {io.fmt(est.bound)}", file=out)
    if est.value > est.bound + 1e-8:
        raise EvaluationError(f"estimate {est.value} exceeds the norm bound {est.bound}")
    return EXIT_OK


def cmd_figure(args, out) -> int:
    if args.id not in FIGURE_IDS:
        raise UsageError(f"unknown figure id {args.id}; expected 1..6")
    try:
        panels = figure_panels(args.id, args.grid_radial, args.grid_angular, args.r_max, args.schedule)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    args.outdir.mkdir(parents=True, exist_ok=True)
    for panel in panels:
        path = args.outdir / panel.filename
        io.atomic_write(path, io.cloud_svg(list(panel.clouds), panel.title))
        print(path, file=out)
    return EXIT_OK


COMMANDS = {"pairs": cmd_pairs, "range": cmd_range, "check": cmd_check, "berq": cmd_berq, "figure": cmd_figure}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"qberezin: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (EvaluationError, TruncationError, LengthOverflowError, ConsistencyError, FloatingPointError) as exc:
        print(f"qberezin: evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except OSError as exc:
        print(f"qberezin: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


__all__ = ["main", "build_parser", "RunConfig", "Output"]
