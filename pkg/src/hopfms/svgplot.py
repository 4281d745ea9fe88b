"""Deterministic SVG emission for knots and polylines.

Every figure is a pure function of the data passed in: fixed canvas
sizes, fixed palette, fixed 6-decimal coordinate formatting, no
timestamps — identical inputs give byte-identical files.
"""

from __future__ import annotations

import numpy as np

from hopfms.knots import HopfKnotCurve

_PALETTE = ["#1f6fb2", "#c2452d", "#3d8c40", "#8248a8", "#b0760e", "#3a3a3a"]


def _fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _polyline(px: np.ndarray, py: np.ndarray, color: str, width: float = 1.2) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(px, py))
    return (
        f'<polyline points="{pts}" fill="none" stroke="{color}" '
        f'stroke-width="{width}" stroke-linejoin="round"/>'
    )


def _text(x: float, y: float, s: str, color: str = "#3a3a3a", size: int = 11) -> str:
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="monospace" '
        f'font-size="{size}" fill="{color}">{s}</text>'
    )


def _scale(v: np.ndarray, lo: float, hi: float, out_lo: float, out_hi: float) -> np.ndarray:
    span = hi - lo if hi > lo else 1.0
    return out_lo + (v - lo) / span * (out_hi - out_lo)


def _split_on_wrap(x: np.ndarray, y: np.ndarray, period: float = 1.0):
    """Split a sequence into runs wherever a coordinate wraps around."""
    cut = np.nonzero(np.abs(np.diff(x)) > period / 2.0)[0] + 1
    start = 0
    for c in list(cut) + [len(x)]:
        if c - start >= 2:
            yield x[start:c], y[start:c]
        start = c


def development_svg(curves: list[HopfKnotCurve], width: int = 640, height: int = 480) -> str:
    """Development view of orbit-space curves: circle coordinate against
    sphere longitude (top panel) and colatitude (bottom panel).
    """
    margin = 45.0
    panel_h = (height - 3 * margin) / 2.0
    lines = _header(width, height)
    panels = [("longitude / 2pi", True), ("colatitude / pi", False)]
    for pi_, (label, is_lon) in enumerate(panels):
        y0 = margin + pi_ * (panel_h + margin)
        lines.append(
            f'<rect x="{_fmt(margin)}" y="{_fmt(y0)}" width="{_fmt(width - 2 * margin)}" '
            f'height="{_fmt(panel_h)}" fill="none" stroke="#888888" stroke-width="0.8"/>'
        )
        lines.append(_text(margin, y0 - 6.0, f"{label} vs circle coordinate"))
        for ci, curve in enumerate(curves):
            color = _PALETTE[ci % len(_PALETTE)]
            if is_lon:
                v = (np.arctan2(curve.u[:, 1], curve.u[:, 0]) / (2.0 * np.pi)) % 1.0
            else:
                v = np.arccos(np.clip(curve.u[:, 2], -1.0, 1.0)) / np.pi
            c = curve.c
            for cs, vs in _split_on_wrap(c, v):
                for vs2, cs2 in _split_on_wrap(vs, cs):
                    px = _scale(cs2, 0.0, 1.0, margin, width - margin)
                    py = _scale(vs2, 0.0, 1.0, y0 + panel_h, y0)
                    lines.append(_polyline(px, py, color))
    for ci, curve in enumerate(curves):
        lines.append(
            _text(margin + 130.0 * ci, height - 12.0, curve.name, _PALETTE[ci % len(_PALETTE)])
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


#: fixed orthographic view direction (no interactivity, one canonical angle)
_VIEW = np.array(
    [
        [0.867423225594017, -0.497571047891727, 0.0],
        [0.249682323961057, 0.435269483078545, 0.864966398591938],
    ]
)


def orthographic_svg(polylines: list[np.ndarray], labels: list[str] | None = None,
                     width: int = 640, height: int = 640) -> str:
    """Orthographic projection of 3-D polylines along a fixed direction."""
    margin = 45.0
    proj = [np.asarray(P, dtype=float) @ _VIEW.T for P in polylines]
    allp = np.vstack(proj)
    lo = allp.min(axis=0)
    hi = allp.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    mid = (lo + hi) / 2.0
    half = span / 2.0
    lines = _header(width, height)
    for ci, P in enumerate(proj):
        color = _PALETTE[ci % len(_PALETTE)]
        px = _scale(P[:, 0], mid[0] - half, mid[0] + half, margin, width - margin)
        py = _scale(P[:, 1], mid[1] - half, mid[1] + half, height - margin, margin)
        lines.append(_polyline(px, py, color))
        if labels is not None:
            lines.append(_text(margin + 130.0 * ci, height - 12.0, labels[ci], color))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
