"""
Planar polygon helpers.

Shoelace areas and Sutherland-Hodgman clipping against a half-plane serve as
independent oracles for the closed-form rectangle/half-plane area used by the
material flux partition.
"""

from __future__ import annotations

import numpy as np

from .models import FloatArray, InterfaceLine, Rect

Point = tuple[float, float]


def shoelace_area(polygon: list[Point]) -> float:
    """Signed area, positive for counter-clockwise vertices."""
    if len(polygon) < 3:
        return 0.0
    area = 0.0
    for k, (x0, y0) in enumerate(polygon):
        x1, y1 = polygon[(k + 1) % len(polygon)]
        area += x0 * y1 - x1 * y0
    return 0.5 * area


def clip_halfplane(polygon: list[Point], normal: Point, point: Point, offset: float) -> list[Point]:
    """Keep the part of ``polygon`` where ``normal . (x - point) <= offset``."""

    def dist(p: Point) -> float:
        return normal[0] * (p[0] - point[0]) + normal[1] * (p[1] - point[1]) - offset

    out: list[Point] = []
    n = len(polygon)
    for k in range(n):
        cur, nxt = polygon[k], polygon[(k + 1) % n]
        d_cur, d_nxt = dist(cur), dist(nxt)
        if d_cur <= 0.0:
            out.append(cur)
        if (d_cur < 0.0 < d_nxt) or (d_nxt < 0.0 < d_cur):
            t = d_cur / (d_cur - d_nxt)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def clip_rect(polygon: list[Point], rect: Rect) -> list[Point]:
    """Intersection of a convex polygon with an axis-aligned rectangle."""
    out = clip_halfplane(polygon, (-1.0, 0.0), (rect.x_min, 0.0), 0.0)
    out = clip_halfplane(out, (1.0, 0.0), (rect.x_max, 0.0), 0.0)
    out = clip_halfplane(out, (0.0, -1.0), (0.0, rect.y_min), 0.0)
    return clip_halfplane(out, (0.0, 1.0), (0.0, rect.y_max), 0.0)


def material_area(rect: Rect, line: InterfaceLine) -> float:
    """Area of the material-0 side of ``line`` inside ``rect``, by polygon clipping."""
    clipped = clip_halfplane(rect.corners(), line.normal, line.center, line.offset)
    return abs(shoelace_area(clipped))


def _fraction_of_alpha(alpha: FloatArray, a: FloatArray, b: FloatArray) -> FloatArray:
    """
    Area fraction below a line at distance ``alpha`` from the lowest rectangle corner.

    ``a <= b`` are the rectangle extents projected on the normal.
    """
    safe_ab = np.where(a > 0.0, a * b, 1.0)
    safe_b = np.where(b > 0.0, b, 1.0)
    low = alpha**2 / (2.0 * safe_ab)
    mid = (alpha - 0.5 * a) / safe_b
    high = 1.0 - (a + b - alpha) ** 2 / (2.0 * safe_ab)
    frac = np.where(alpha <= a, low, np.where(alpha <= b, mid, high))
    # a == 0: the line is parallel to a rectangle side
    frac = np.where(a > 0.0, frac, alpha / safe_b)
    return np.asarray(np.clip(frac, 0.0, 1.0))


def halfplane_fraction(
    nx: FloatArray, ny: FloatArray, width: FloatArray, height: FloatArray, s: FloatArray
) -> FloatArray:
    """
    Fraction of a ``width x height`` rectangle where ``n . (x - centre) <= s``.

    Vectorised; a vanishing normal puts the whole rectangle on the material-0
    side when ``s >= 0``.
    """
    m1 = np.abs(nx) * width
    m2 = np.abs(ny) * height
    a = np.minimum(m1, m2)
    b = np.maximum(m1, m2)
    alpha = np.clip(s + 0.5 * (a + b), 0.0, a + b)
    frac = _fraction_of_alpha(alpha, a, b)
    return np.asarray(np.where(b > 0.0, frac, np.where(s >= 0.0, 1.0, 0.0)))


def rect_halfplane_area(
    box: FloatArray,
    nx: FloatArray,
    ny: FloatArray,
    cx: FloatArray,
    cy: FloatArray,
    s: FloatArray,
) -> FloatArray:
    """
    Area of ``{n . (x - c) <= s}`` inside boxes ``(x_a, x_b, y_a, y_b)``.

    ``box`` has a leading axis of length 4; corners may come in any order.
    Degenerate boxes have zero area.
    """
    x_lo = np.minimum(box[0], box[1])
    x_hi = np.maximum(box[0], box[1])
    y_lo = np.minimum(box[2], box[3])
    y_hi = np.maximum(box[2], box[3])
    width = x_hi - x_lo
    height = y_hi - y_lo
    # Re-centre the line on the box centre
    s_box = s - (nx * (0.5 * (x_lo + x_hi) - cx) + ny * (0.5 * (y_lo + y_hi) - cy))
    return np.asarray(halfplane_fraction(nx, ny, width, height, s_box) * width * height)
