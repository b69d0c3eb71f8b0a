"""Deterministic SVG rendering of packings.

Prohibited disks are drawn solid, packed circles as outlines.  Output is
a plain string with fixed number formatting, so identical layouts give
byte-identical files.
"""

from __future__ import annotations

from .geometry import Instance, Layout

_VIEW = "-1.05 -1.05 2.1 2.1"
_PROHIBITED_FILL = "#6b6b6b"
_CIRCLE_STROKE = "#1a6faf"
_WIDTH = "0.005"


def _num(value: float) -> str:
    return format(float(value), ".12g")


def render_svg(layout: Layout, instance: Instance, size: int = 640) -> str:
    """SVG document for one layout inside its container."""
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_VIEW}" '
        f'width="{size}" height="{size}">',
        f'  <circle cx="0" cy="0" r="1" fill="none" stroke="#000000" stroke-width="{_WIDTH}"/>',
    ]
    # SVG y grows downward; mirror so the geometry reads naturally.
    for f in instance.prohibited:
        lines.append(
            f'  <circle cx="{_num(f.center.x)}" cy="{_num(-f.center.y)}" '
            f'r="{_num(f.radius)}" fill="{_PROHIBITED_FILL}" stroke="none"/>'
        )
    for x, y in layout.centers:
        lines.append(
            f'  <circle cx="{_num(x)}" cy="{_num(-y)}" r="{_num(layout.radius)}" '
            f'fill="none" stroke="{_CIRCLE_STROKE}" stroke-width="{_WIDTH}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
