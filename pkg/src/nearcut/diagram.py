"""Polygon drawings: outside atoms on the sides, cuts as diagonals."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .errors import ParameterError, RepresentationError
from .graph import members
from .structure import CrossComponent, PolygonRep, verify_polygon

RADIUS = 200.0
MARGIN = 90.0


def _label(mask: int) -> str:
    return "{" + ",".join(str(v) for v in members(mask)) + "}"


def _corners(m: int) -> list[tuple[float, float]]:
    # point p_i sits between sides i-1 and i; start at the top and go clockwise
    return [
        (RADIUS * math.sin(2 * math.pi * i / m), -RADIUS * math.cos(2 * math.pi * i / m))
        for i in range(m)
    ]


def _checked(P: PolygonRep | None, component: CrossComponent) -> PolygonRep:
    if P is None or len(component) < 2:
        raise ParameterError("a polygon drawing needs a component with at least two crossing cuts")
    rep = verify_polygon(P, component)
    if not rep.ok:
        check, msg = rep.first
        raise RepresentationError(f"refusing to draw an unverified polygon ({check}: {msg})")
    return P


def _chords(P: PolygonRep, component: CrossComponent) -> list[tuple[int, int, str]]:
    out = []
    for local, idx in enumerate(component.cuts):
        l, r = P.interval_of[local]
        out.append((l, r % P.m, f"cut {idx}"))
    return out


def _legend(P: PolygonRep) -> list[str]:
    lines = []
    for a in P.inside:
        bits = "".join("1" if b else "0" for b in P.membership[a])
        lines.append(f"inside {_label(P.atoms[a])}: {bits}")
    return lines


def polygon_dot(P: PolygonRep | None, component: CrossComponent) -> str:
    """Graphviz source with pinned node positions (render with ``neato -n``)."""
    P = _checked(P, component)
    m = P.m
    pts = _corners(m)
    out = ["graph polygon {", '  node [shape=point, width=0.08];', '  edge [fontsize=10];']
    for i, (x, y) in enumerate(pts):
        out.append(f'  p{i} [pos="{x:.1f},{-y:.1f}!", xlabel="p{i}"];')
    for i, a in enumerate(P.outside):
        out.append(f'  p{i} -- p{(i + 1) % m} [label="{_label(P.atoms[a])}", penwidth=2];')
    for u, v, name in _chords(P, component):
        out.append(f'  p{u} -- p{v} [style=dashed, color=gray40, tooltip="{name}"];')
    legend = _legend(P)
    if legend:
        text = "\\l".join(legend) + "\\l"
        out.append(f'  legend [shape=box, fontsize=10, label="{text}", pos="0,{-RADIUS - MARGIN / 2:.1f}!"];')
    out.append("}")
    return "\n".join(out) + "\n"


def polygon_svg(P: PolygonRep | None, component: CrossComponent) -> str:
    P = _checked(P, component)
    m = P.m
    legend = _legend(P)
    pts = [(x + RADIUS + MARGIN, y + RADIUS + MARGIN) for x, y in _corners(m)]
    width = 2 * (RADIUS + MARGIN)
    height = width + 16 * len(legend) + (10 if legend else 0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}" font-family="sans-serif" font-size="11">'
    ]
    for u, v, name in _chords(P, component):
        (x1, y1), (x2, y2) = pts[u], pts[v]
        out.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" stroke="#888" '
            f'stroke-dasharray="4 3"><title>{escape(name)}</title></line>'
        )
    cx = cy = RADIUS + MARGIN
    for i, a in enumerate(P.outside):
        (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % m]
        out.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" stroke="black" stroke-width="2"/>')
        mx, my = (x1 + x2) / 2, (y1 + y2) / 2
        d = math.hypot(mx - cx, my - cy) or 1.0
        lx, ly = mx + (mx - cx) / d * 22, my + (my - cy) / d * 22
        out.append(f'<text x="{lx:.1f}" y="{ly:.1f}" text-anchor="middle">{escape(_label(P.atoms[a]))}</text>')
    for i, (x, y) in enumerate(pts):
        out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3"/>')
    y = width
    for line in legend:
        out.append(f'<text x="10" y="{y:.0f}">{escape(line)}</text>')
        y += 16
    out.append("</svg>")
    return "\n".join(out) + "\n"
