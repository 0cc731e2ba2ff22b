"""SVG and CSV output for curve approximations."""

from __future__ import annotations

import csv
import io
import os
from typing import Sequence

import numpy as np

from .curve import CurveApproximation

# categorical palette used when coloring by initial state
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _g(x: float) -> str:
    return format(float(x), ".10g")


def svg_text(approx: CurveApproximation, *, color_states: bool = False,
             extra_points: Sequence[complex] = (), size: int = 800) -> str:
    """One polyline (or one per v_j of the initial loop), y axis pointing up."""
    pts = approx.points
    allpts = np.concatenate([pts, np.asarray(extra_points, dtype=complex)])
    xmin, xmax = allpts.real.min(), allpts.real.max()
    ymin, ymax = allpts.imag.min(), allpts.imag.max()
    span = max(xmax - xmin, ymax - ymin, 1e-12)
    margin = 0.05 * span
    x0, y0 = xmin - margin, -ymax - margin
    w, h = xmax - xmin + 2 * margin, ymax - ymin + 2 * margin
    seg = np.abs(np.diff(pts))
    positive = seg[seg > 0]
    stroke = 0.3 * positive.min() if len(positive) else 0.002 * span
    stroke = min(stroke, 0.005 * span)

    def polyline(z: np.ndarray, color: str) -> str:
        coords = " ".join(f"{_g(p.real)},{_g(-p.imag + 0.0)}" for p in z)
        return (f'<polyline fill="none" stroke="{color}" stroke-width="{_g(stroke)}" '
                f'stroke-linejoin="round" points="{coords}"/>')

    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
              f'height="{int(round(size * h / w))}" viewBox="{_g(x0)} {_g(y0)} {_g(w)} {_g(h)}">\n')
    if color_states and approx.seg_root is not None:
        roots = approx.seg_root
        for r in np.unique(roots):
            idx = np.flatnonzero(roots == r)
            # segments of one root are contiguous; include the closing vertex
            z = pts[idx[0]: idx[-1] + 2]
            out.write(polyline(z, PALETTE[int(r) % len(PALETTE)]) + "\n")
    else:
        out.write(polyline(pts, "#000000") + "\n")
    out.write("</svg>\n")
    return out.getvalue()


def csv_text(approx: CurveApproximation) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", "x", "y"])
    for t, p in zip(approx.t, approx.points):
        writer.writerow(["%.17g" % t, "%.17g" % p.real, "%.17g" % p.imag])
    return out.getvalue()


def write_text(path: str | os.PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
