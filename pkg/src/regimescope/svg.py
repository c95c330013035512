"""Static SVG charts with byte-stable output.

Coordinates are printed with two decimals and elements are emitted in a fixed
order, so identical inputs always give identical bytes. PMF charts draw one
``rect`` per bin and exactly five ``line.marker`` elements (mode and the
mean +/- 1 and 2 sigma bounds); axes are ``path`` elements.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .complexity.profile import ComplexityProfile
from .distribution import PmfReport
from .errors import UnsupportedKind
from .horizons import HorizonSummary
from .infoflow import InfoFlowReport

WIDTH, HEIGHT = 640, 360
PAD_L, PAD_R, PAD_T, PAD_B = 56, 16, 28, 40

KINDS = ("pmf", "horizons", "nmi", "profile")


def _n(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class _Frame:
    """Maps data coordinates into a plot rectangle."""

    def __init__(self, x0, x1, y0, y1, left=PAD_L, top=PAD_T, width=None, height=None):
        if x1 <= x0:
            x0, x1 = x0 - 0.5, x0 + 0.5
        if y1 <= y0:
            y0, y1 = y0 - 0.5, y0 + 0.5
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.left, self.top = left, top
        self.w = width if width is not None else WIDTH - PAD_L - PAD_R
        self.h = height if height is not None else HEIGHT - PAD_T - PAD_B

    def x(self, v):
        return self.left + (v - self.x0) / (self.x1 - self.x0) * self.w

    def y(self, v):
        return self.top + self.h - (v - self.y0) / (self.y1 - self.y0) * self.h

    def axes(self, xlabel: str, ylabel: str) -> list[str]:
        b, l = self.top + self.h, self.left
        return [
            f'<path class="axis" d="M{_n(l)} {_n(self.top)}V{_n(b)}H{_n(l + self.w)}" '
            'fill="none" stroke="#000"/>',
            f'<text x="{_n(l + self.w / 2)}" y="{_n(b + 30)}" text-anchor="middle">{escape(xlabel)}</text>',
            f'<text x="{_n(l - 8)}" y="{_n(self.top - 8)}">{escape(ylabel)}</text>',
            f'<text x="{_n(l)}" y="{_n(b + 14)}" text-anchor="start">{self.x0:.4g}</text>',
            f'<text x="{_n(l + self.w)}" y="{_n(b + 14)}" text-anchor="end">{self.x1:.4g}</text>',
            f'<text x="{_n(l - 4)}" y="{_n(b)}" text-anchor="end">{self.y0:.3g}</text>',
            f'<text x="{_n(l - 4)}" y="{_n(self.top + 10)}" text-anchor="end">{self.y1:.3g}</text>',
        ]


def _doc(title: str, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">'
    )
    title_el = f'<text x="{WIDTH / 2:.2f}" y="16" text-anchor="middle" font-size="13">{escape(title)}</text>'
    return "\n".join([head, f"<title>{escape(title)}</title>", title_el, *body, "</svg>"]) + "\n"


def _polyline(frame: _Frame, xs, ys, cls: str, color: str, dash: str | None = None) -> list[str]:
    pts = [(x, y) for x, y in zip(xs, ys) if y is not None and math.isfinite(y)]
    if not pts:
        return []
    coords = " ".join(f"{_n(frame.x(x))},{_n(frame.y(y))}" for x, y in pts)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return [f'<polyline class="{cls}" points="{coords}" fill="none" stroke="{color}"{extra}/>']


def _pmf_svg(report: PmfReport) -> str:
    pmf, st = report.pmf, report.stats
    if len(pmf.probs) == 0:
        raise UnsupportedKind("empty PMF")
    markers = [
        ("mode", st.mode, "#000", None),
        ("sigma1", st.band1.lo, "#1f4fd1", "4 3"),
        ("sigma1", st.band1.hi, "#1f4fd1", "4 3"),
        ("sigma2", st.band2.lo, "#c62828", "2 3"),
        ("sigma2", st.band2.hi, "#c62828", "2 3"),
    ]
    lo = min(float(pmf.edges[0]), *(m[1] for m in markers))
    hi = max(float(pmf.edges[-1]), *(m[1] for m in markers))
    f = _Frame(lo, hi, 0.0, float(pmf.probs.max()) * 1.05)
    body = f.axes(report.label, "probability")
    mode_i = pmf.mode_index
    for i, (a, b, p) in enumerate(zip(pmf.edges[:-1], pmf.edges[1:], pmf.probs)):
        color = "#2e7d32" if i == mode_i else "#9e9e9e"
        x, w = f.x(a), max(f.x(b) - f.x(a), 0.5)
        y = f.y(p)
        body.append(
            f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(w)}" height="{_n(f.top + f.h - y)}" fill="{color}"/>'
        )
    for name, v, color, dash in markers:
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        body.append(
            f'<line class="marker {name}" x1="{_n(f.x(v))}" y1="{_n(f.top)}" x2="{_n(f.x(v))}" '
            f'y2="{_n(f.top + f.h)}" stroke="{color}"{extra}/>'
        )
    return _doc(f"PMF: {report.label}", body)


def _horizons_svg(summaries: Sequence[HorizonSummary]) -> str:
    if not summaries:
        raise UnsupportedKind("no horizon summaries to plot")
    xs = list(range(len(summaries)))
    series = {
        "min": [s.min for s in summaries],
        "max": [s.max for s in summaries],
        "mode": [s.mode for s in summaries],
    }
    vals = [v for ys in series.values() for v in ys]
    f = _Frame(0, max(len(xs) - 1, 1), min(vals + [0.0]), max(vals + [0.0]))
    body = f.axes("horizon", "return (%)")
    body.append(
        f'<path class="zero" d="M{_n(f.x(0))} {_n(f.y(0))}H{_n(f.x(f.x1))}" stroke="#bbb" fill="none"/>'
    )
    colors = {"min": "#c62828", "max": "#2e7d32", "mode": "#1f4fd1"}
    for name, ys in series.items():
        body += _polyline(f, xs, ys, f"series {name}", colors[name])
    for x, s in zip(xs, summaries):
        body.append(
            f'<text x="{_n(f.x(x))}" y="{_n(f.top + f.h + 26)}" text-anchor="middle" font-size="9">'
            f"{escape(s.spec.label)}</text>"
        )
    return _doc("Minimum, maximum and mode return by horizon", body)


def _nmi_svg(curve) -> str:
    if isinstance(curve, InfoFlowReport):
        curve = curve.nmi
    ys = [float(v) for v in curve]
    if not ys:
        raise UnsupportedKind("empty lag curve")
    xs = list(range(1, len(ys) + 1))
    f = _Frame(1, max(len(ys), 2), 0.0, max(1.0, max(ys)))
    body = f.axes("lag", "NMI")
    body += _polyline(f, xs, ys, "series nmi", "#1f4fd1")
    return _doc("Lagged normalized mutual information", body)


def _profile_svg(profile: ComplexityProfile) -> str:
    entries = [e for e in profile.entries if e.error is None]
    if not entries:
        raise UnsupportedKind("profile has no successful horizons")
    panel_w = (WIDTH - PAD_L - PAD_R - 2 * 40) / 3
    body = []
    xs = list(range(len(entries)))
    for i, (attr, title, color) in enumerate(
        [("sne", "SNE", "#1f4fd1"), ("hurst", "H(2)", "#2e7d32"), ("lle", "largest Lyapunov", "#c62828")]
    ):
        ys = [getattr(e, attr) for e in entries]
        f = _Frame(0, max(len(xs) - 1, 1), min(ys + [0.0]), max(ys + [1.0]), left=PAD_L + i * (panel_w + 40), width=panel_w)
        body += f.axes("horizon index", title)
        body += _polyline(f, xs, ys, f"series {attr}", color)
    return _doc("Return complexity by horizon", body)


def emit_svg(report, kind: str) -> str:
    """Render ``report`` as one of ``pmf``, ``horizons``, ``nmi``, ``profile``."""
    if kind == "pmf":
        return _pmf_svg(report)
    if kind == "horizons":
        return _horizons_svg(report)
    if kind == "nmi":
        return _nmi_svg(report)
    if kind == "profile":
        return _profile_svg(report)
    raise UnsupportedKind(f"unknown plot kind {kind!r}; choose from {', '.join(KINDS)}")
