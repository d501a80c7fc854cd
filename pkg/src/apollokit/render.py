"""Plain SVG drawings of planar (n = 2) configurations."""

from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence

from .errors import DimensionError
from .spheres import Hyperplane, OrientedSphere, Sphere

__all__ = ["render_svg", "auto_viewport", "clip_line", "STROKE"]

STROKE = {"inward": "#1f4e9c", "outward": "#c0392b", "line": "#27864a"}


def auto_viewport(spheres: Sequence[OrientedSphere], margin: float = 0.1,
                  max_radius: Optional[float] = None) -> tuple:
    """Bounding box of the circles, padded by ``margin`` of its size.

    Circles larger than ``max_radius`` (default: 4x the median radius) are
    ignored so a huge bounding circle does not shrink everything else.
    """
    circles = [s for s in spheres if isinstance(s, Sphere)]
    if not circles:
        return (-2.0, -2.0, 2.0, 2.0)
    radii = sorted(abs(float(s.radius)) for s in circles)
    if max_radius is None:
        max_radius = 4 * radii[len(radii) // 2]
    keep = [s for s in circles if abs(float(s.radius)) <= max_radius] or circles
    xs0 = min(float(s.center[0]) - abs(float(s.radius)) for s in keep)
    xs1 = max(float(s.center[0]) + abs(float(s.radius)) for s in keep)
    ys0 = min(float(s.center[1]) - abs(float(s.radius)) for s in keep)
    ys1 = max(float(s.center[1]) + abs(float(s.radius)) for s in keep)
    pad = margin * max(xs1 - xs0, ys1 - ys0, 1e-9)
    return (xs0 - pad, ys0 - pad, xs1 + pad, ys1 + pad)


def clip_line(normal: Sequence[float], offset: float, box: tuple) -> Optional[tuple]:
    """Segment of ``{y : y.normal = offset}`` inside ``box``, or None."""
    hx, hy = float(normal[0]), float(normal[1])
    m = float(offset)
    px, py = m * hx, m * hy
    dx, dy = -hy, hx
    x0, y0, x1, y1 = box
    lo, hi = -math.inf, math.inf
    for p, d, a, b in ((px, dx, x0, x1), (py, dy, y0, y1)):
        if abs(d) < 1e-15:
            if p < a or p > b:
                return None
            continue
        t0, t1 = (a - p) / d, (b - p) / d
        if t0 > t1:
            t0, t1 = t1, t0
        lo, hi = max(lo, t0), min(hi, t1)
    if lo >= hi:
        return None
    return (px + lo * dx, py + lo * dy, px + hi * dx, py + hi * dy)


def render_svg(spheres: Iterable[OrientedSphere], viewport: Optional[tuple] = None,
               size: int = 600, stroke_width: float = 1.0) -> str:
    """SVG text for circles and lines.

    Inward circles, outward circles and lines get distinct stroke colors.
    ``viewport`` is ``(xmin, ymin, xmax, ymax)`` in model coordinates.
    """
    spheres = list(spheres)
    for s in spheres:
        if s.dim != 2:
            raise DimensionError("SVG rendering supports n = 2 only")
    box = viewport if viewport is not None else auto_viewport(spheres)
    x0, y0, x1, y1 = (float(v) for v in box)
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"empty viewport {box}")
    scale = size / max(x1 - x0, y1 - y0)
    width = (x1 - x0) * scale
    height = (y1 - y0) * scale

    def tx(x):
        return (x - x0) * scale

    def ty(y):
        return (y1 - y) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" height="{height:.2f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect width="100%" height="100%" fill="white"/>',
    ]
    for s in spheres:
        if isinstance(s, Sphere):
            r = float(s.radius)
            color = STROKE["inward"] if r > 0 else STROKE["outward"]
            out.append(f'<circle cx="{tx(float(s.center[0])):.4f}" cy="{ty(float(s.center[1])):.4f}" '
                       f'r="{abs(r) * scale:.4f}" fill="none" stroke="{color}" '
                       f'stroke-width="{stroke_width}"/>')
        elif isinstance(s, Hyperplane):
            seg = clip_line(s.normal, float(s.offset), (x0, y0, x1, y1))
            if seg is None:
                continue
            ax, ay, bx, by = seg
            out.append(f'<line x1="{tx(ax):.4f}" y1="{ty(ay):.4f}" x2="{tx(bx):.4f}" '
                       f'y2="{ty(by):.4f}" stroke="{STROKE["line"]}" stroke-width="{stroke_width}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
