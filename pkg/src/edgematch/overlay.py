"""SVG rendering of a match: both edge sets in one frame."""

from __future__ import annotations

import math

from .basis import Transform
from .edges import EdgeSet
from .verify import MatchResult

_STYLE = """\
    .frame { fill: none; stroke: #888888; stroke-width: 0.5; }
    .ref { stroke: #1f77b4; stroke-width: 0.8; }
    .probe { stroke: #d62728; stroke-width: 0.8; }
    .matched { stroke: #2ca02c; stroke-width: 0.6; }
    .basis { stroke: #ff7f0e; stroke-width: 2.0; fill: none; }
"""

_SEG_HALF = 3.0


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _segment(x: float, y: float, theta: float, cls: str | None = None) -> str:
    cx = _SEG_HALF * math.cos(theta)
    cy = _SEG_HALF * math.sin(theta)
    attr = f' class="{cls}"' if cls else ""
    return (
        f'<line{attr} x1="{_fmt(x - cx)}" y1="{_fmt(y - cy)}" '
        f'x2="{_fmt(x + cx)}" y2="{_fmt(y + cy)}" />'
    )


def render_overlay(ref: EdgeSet, probe: EdgeSet, result: MatchResult) -> str:
    """Reference edges, transformed probe edges, matched-pair connectors,
    and the accepted basis couple as distinct stroke classes.

    Probe edges are mapped by the result transform (identity when the match
    carries none).  Six-pixel segments along each orientation; coordinates
    are in the reference frame.
    """
    t = result.transform if result.transform is not None else Transform(1.0, 0.0, 0.0)
    w, h = ref.width, ref.height
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1 -1 {w + 2} {h + 2}" '
        f'width="{w + 2}" height="{h + 2}">',
        f"<style>\n{_STYLE}</style>",
        f'<rect class="frame" x="0" y="0" width="{w}" height="{h}" />',
    ]
    lines.append('<g class="ref">')
    for e in ref.edges:
        lines.append(_segment(e.x, e.y, e.theta))
    lines.append("</g>")
    lines.append('<g class="probe">')
    mapped = [t.apply(e.x, e.y) for e in probe.edges]
    for (mx, my), e in zip(mapped, probe.edges):
        lines.append(_segment(mx, my, e.theta))
    lines.append("</g>")
    lines.append('<g class="matched">')
    for a, n in result.matched_pairs:
        ea = ref.edges[a]
        mx, my = mapped[n]
        lines.append(
            f'<line x1="{_fmt(ea.x)}" y1="{_fmt(ea.y)}" '
            f'x2="{_fmt(mx)}" y2="{_fmt(my)}" />'
        )
    lines.append("</g>")
    if result.basis is not None:
        (ai, aj), (ni, nj) = result.basis
        lines.append('<g class="basis">')
        for a in (ai, aj):
            ea = ref.edges[a]
            lines.append(_segment(ea.x, ea.y, ea.theta))
        for n in (ni, nj):
            mx, my = mapped[n]
            lines.append(_segment(mx, my, probe.edges[n].theta))
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
