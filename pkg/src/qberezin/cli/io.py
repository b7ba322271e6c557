"""CSV, SVG and JSON writers; every file is written to a temp name and renamed."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from ..geometry.sampling import BRANCH_NAMES, PointCloud

CSV_HEADER = ["q", "branch", "theta", "w1_re", "w1_im", "w2_re", "w2_im", "val_re", "val_im"]
BRANCH_COLORS = {"plus": "#1f4e9c", "minus": "#c2362b", "circle": "#2b8a3e"}
CANVAS = 800
PLOT_LO, PLOT_HI = 70, 770


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent if str(path.parent) else ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def fmt(x: float) -> str:
    return "%.17g" % x


def cloud_csv(cloud: PointCloud) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    q = fmt(cloud.q)
    for v, w1, w2, c, th in zip(cloud.values, cloud.w1, cloud.w2, cloud.branch, cloud.theta):
        w.writerow([q, BRANCH_NAMES[c], fmt(th), fmt(w1.real), fmt(w1.imag), fmt(w2.real), fmt(w2.imag),
                    fmt(v.real), fmt(v.imag)])
    return buf.getvalue()


def read_csv(path) -> PointCloud:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f"{path}: unexpected CSV header")
    body = rows[1:]
    num = np.array([[float(x) for i, x in enumerate(r) if i != 1] for r in body]).reshape(-1, 8)
    branch = np.array([BRANCH_NAMES.index(r[1]) for r in body], dtype=int)
    q = float(num[0, 0]) if len(num) else 1.0
    return PointCloud(
        num[:, 6] + 1j * num[:, 7],
        num[:, 2] + 1j * num[:, 3],
        num[:, 4] + 1j * num[:, 5],
        branch,
        num[:, 1],
        q,
    )


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _nice_step(span: float, target: int = 5) -> float:
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step(hi - lo)
    start = math.ceil(lo / step) * step
    out = []
    x = start
    while x <= hi + 1e-12 * step:
        out.append(0.0 if abs(x) < 1e-12 * step else x)
        x += step
    return out


def _frame(clouds):
    vals = np.concatenate([c.values for _, c in clouds]) if clouds else np.zeros(1, complex)
    if len(vals) == 0:
        vals = np.zeros(1, complex)
    x0, x1 = float(vals.real.min()), float(vals.real.max())
    y0, y1 = float(vals.imag.min()), float(vals.imag.max())
    span = max(x1 - x0, y1 - y0)
    if span <= 0:
        span = max(abs(x0), abs(y0), 1.0) * 0.1
    span *= 1.1  # 5% padding on each side
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    return cx - span / 2, cy - span / 2, span


def cloud_svg(clouds, title: str) -> str:
    """Overlay of labelled clouds; markers falling on the same pixel are drawn once."""
    xmin, ymin, span = _frame(clouds)
    width = PLOT_HI - PLOT_LO
    scale = width / span

    def px(x):
        return PLOT_LO + (x - xmin) * scale

    def py(y):
        return PLOT_HI - (y - ymin) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white"/>',
        f'<text class="title" x="{CANVAS / 2:.1f}" y="36" text-anchor="middle" font-family="sans-serif" '
        f'font-size="18">{_escape(title)}</text>',
        f'<rect class="frame" x="{PLOT_LO}" y="{PLOT_LO}" width="{width}" height="{width}" fill="none" '
        'stroke="black" stroke-width="1"/>',
    ]
    out.append('<g class="axes" font-family="sans-serif" font-size="12">')
    for x in _ticks(xmin, xmin + span):
        X = px(x)
        out.append(f'<line x1="{X:.2f}" y1="{PLOT_HI}" x2="{X:.2f}" y2="{PLOT_HI + 6}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{PLOT_HI + 20}" text-anchor="middle">{x:.6g}</text>')
    for y in _ticks(ymin, ymin + span):
        Y = py(y)
        out.append(f'<line x1="{PLOT_LO - 6}" y1="{Y:.2f}" x2="{PLOT_LO}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{PLOT_LO - 9}" y="{Y + 4:.2f}" text-anchor="end">{y:.6g}</text>')
    out.append("</g>")
    for label, cloud in clouds:
        out.append(f'<g class="cloud" data-label="{_escape(label)}">')
        X = np.round(px(cloud.values.real))
        Y = np.round(py(cloud.values.imag))
        _, keep = np.unique(np.column_stack([X, Y, cloud.branch]), axis=0, return_index=True)
        for i in np.sort(keep):
            color = BRANCH_COLORS[BRANCH_NAMES[cloud.branch[i]]]
            out.append(f'<circle cx="{X[i]:.0f}" cy="{Y[i]:.0f}" r="1.5" fill="{color}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
