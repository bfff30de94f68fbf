"""Planar geometry for zones and routes.

Coordinates are planar meters in a local projection. Every operation is a
pure function of its inputs, so repeated calls are bit-identical.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ValidationError

#: Distance below which two points count as coincident (meters).
EPSILON = 1e-9


@dataclass(frozen=True)
class Point2D:
    """A point in planar meter coordinates (easting, northing)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"point coordinates must be finite, got ({self.x!r}, {self.y!r})")

    def distance_to(self, other: "Point2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


def _orient(a: Point2D, b: Point2D, c: Point2D) -> float:
    """z-component of (b - a) x (c - a)."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _point_segment(p: Point2D, a: Point2D, b: Point2D) -> tuple[float, float]:
    """Distance from p to segment ab, plus the parameter t of the closest point."""
    abx = b.x - a.x
    aby = b.y - a.y
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return p.distance_to(a), 0.0
    t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / denom
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(p.x - (a.x + t * abx), p.y - (a.y + t * aby)), t


def _segments_touch(a: Point2D, b: Point2D, c: Point2D, d: Point2D) -> bool:
    """True if segments ab and cd share any point (within EPSILON)."""
    d1 = _orient(c, d, a)
    d2 = _orient(c, d, b)
    d3 = _orient(a, b, c)
    d4 = _orient(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    for p, (u, v) in ((a, (c, d)), (b, (c, d)), (c, (a, b)), (d, (a, b))):
        if _point_segment(p, u, v)[0] <= EPSILON:
            return True
    return False


def _signed_area(pts: Sequence[Point2D]) -> float:
    acc = 0.0
    n = len(pts)
    for i in range(n):
        j = (i + 1) % n
        acc += pts[i].x * pts[j].y - pts[j].x * pts[i].y
    return 0.5 * acc


class Polygon:
    """Simple (non-self-intersecting) closed polygon with nonzero area.

    The vertex list is implicitly closed; holes are not supported.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable[Point2D]) -> None:
        pts = tuple(vertices)
        if len(pts) < 3:
            raise ValidationError(f"polygon needs at least 3 vertices, got {len(pts)}")
        n = len(pts)
        for i in range(n):
            if not isinstance(pts[i], Point2D):
                raise ValidationError(f"polygon vertex {i} is not a Point2D")
            if pts[i].distance_to(pts[(i + 1) % n]) <= EPSILON:
                raise ValidationError(f"polygon vertices {i} and {(i + 1) % n} coincide")
        if abs(_signed_area(pts)) <= EPSILON:
            raise ValidationError("polygon has zero area")
        _check_simple(pts)
        self.vertices = pts

    def edges(self) -> Iterable[tuple[Point2D, Point2D]]:
        pts = self.vertices
        n = len(pts)
        for i in range(n):
            yield pts[i], pts[(i + 1) % n]

    def signed_area(self) -> float:
        return _signed_area(self.vertices)

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Polygon) and self.vertices == other.vertices

    def __repr__(self) -> str:
        return f"Polygon({list(self.vertices)!r})"


def _check_simple(pts: Sequence[Point2D]) -> None:
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            c, d = pts[j], pts[(j + 1) % n]
            if j == i + 1:
                # shared endpoint b == c; reject a fold-back spike
                if _point_segment(pts[i], c, d)[0] <= EPSILON or _point_segment(pts[(j + 1) % n], a, b)[0] <= EPSILON:
                    raise ValidationError(f"polygon edges {i} and {j} overlap")
            elif i == 0 and j == n - 1:
                # shared endpoint a == d
                if _point_segment(pts[1], c, d)[0] <= EPSILON or _point_segment(pts[n - 1], a, b)[0] <= EPSILON:
                    raise ValidationError(f"polygon edges {i} and {j} overlap")
            elif _segments_touch(a, b, c, d):
                raise ValidationError(f"polygon is self-intersecting (edges {i} and {j})")


class Polyline:
    """Open chain of distinct points with cumulative arc lengths."""

    __slots__ = ("points", "cumulative")

    def __init__(self, points: Iterable[Point2D]) -> None:
        pts = tuple(points)
        if len(pts) < 2:
            raise ValidationError(f"polyline needs at least 2 points, got {len(pts)}")
        cum = [0.0]
        for prev, cur in zip(pts, pts[1:]):
            step = prev.distance_to(cur)
            if step <= EPSILON:
                raise ValidationError("consecutive polyline points coincide")
            cum.append(cum[-1] + step)
        self.points = pts
        self.cumulative = tuple(cum)

    @property
    def length(self) -> float:
        return self.cumulative[-1]

    def point_at(self, s: float) -> Point2D:
        """Point at arc-length s, clamped to the polyline."""
        s = 0.0 if s < 0.0 else (self.length if s > self.length else s)
        i = bisect_right(self.cumulative, s) - 1
        if i >= len(self.points) - 1:
            return self.points[-1]
        a, b = self.points[i], self.points[i + 1]
        t = (s - self.cumulative[i]) / (self.cumulative[i + 1] - self.cumulative[i])
        return Point2D(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Polyline) and self.points == other.points

    def __repr__(self) -> str:
        return f"Polyline({list(self.points)!r})"


def point_in_polygon(p: Point2D, poly: Polygon) -> bool:
    """True iff p is strictly inside poly or on its boundary (within EPSILON)."""
    for a, b in poly.edges():
        if _point_segment(p, a, b)[0] <= EPSILON:
            return True
    inside = False
    for a, b in poly.edges():
        if (a.y > p.y) != (b.y > p.y):
            x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x_at:
                inside = not inside
    return inside


def _segment_segment_params(a: Point2D, b: Point2D, c: Point2D, d: Point2D) -> list[float]:
    """Parameters t on a->b where the segment meets segment cd.

    Collinear overlaps contribute their two endpoints (clipped to [0, 1]).
    """
    rx, ry = b.x - a.x, b.y - a.y
    sx, sy = d.x - c.x, d.y - c.y
    r_len = math.hypot(rx, ry)
    s_len = math.hypot(sx, sy)
    denom = rx * sy - ry * sx
    qpx, qpy = c.x - a.x, c.y - a.y
    if abs(denom) > 1e-12 * r_len * s_len:
        t = (qpx * sy - qpy * sx) / denom
        u = (qpx * ry - qpy * rx) / denom
        t_tol = EPSILON / r_len
        u_tol = EPSILON / s_len
        if -t_tol <= t <= 1.0 + t_tol and -u_tol <= u <= 1.0 + u_tol:
            return [min(1.0, max(0.0, t))]
        return []
    # parallel: perpendicular offset of c from the ab line
    if abs(qpx * ry - qpy * rx) > EPSILON * r_len:
        return []
    rr = rx * rx + ry * ry
    t0 = (qpx * rx + qpy * ry) / rr
    t1 = ((d.x - a.x) * rx + (d.y - a.y) * ry) / rr
    lo, hi = (t0, t1) if t0 <= t1 else (t1, t0)
    lo = max(lo, 0.0)
    hi = min(hi, 1.0)
    t_tol = EPSILON / r_len
    if hi < lo - t_tol:
        return []
    if hi - lo <= t_tol:
        return [min(1.0, max(0.0, lo))]
    return [lo, hi]


def segment_polygon_crossings(a: Point2D, b: Point2D, poly: Polygon) -> list[tuple[Point2D, float]]:
    """All points where segment a->b meets the polygon boundary.

    Returns (point, t) pairs sorted ascending by the fractional position t
    along a->b, deduplicated within EPSILON. Collinear overlap spans are
    reported by their two endpoints.
    """
    seg_len = a.distance_to(b)
    if seg_len <= EPSILON:
        raise ValidationError("degenerate segment (endpoints coincide)")
    ts: list[float] = []
    for c, d in poly.edges():
        ts.extend(_segment_segment_params(a, b, c, d))
    ts.sort()
    t_tol = EPSILON / seg_len
    kept: list[float] = []
    for t in ts:
        if kept and t - kept[-1] <= t_tol:
            continue
        kept.append(t)
    return [(Point2D(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)), t) for t in kept]


def point_to_polyline(p: Point2D, line: Polyline) -> tuple[float, float]:
    """Minimum distance from p to the polyline and the arc-length of the
    nearest point. Ties are broken by the smallest arc-length."""
    best_d = math.inf
    best_s = 0.0
    pts = line.points
    cum = line.cumulative
    for i in range(len(pts) - 1):
        d, t = _point_segment(p, pts[i], pts[i + 1])
        s = cum[i] + t * (cum[i + 1] - cum[i])
        if d < best_d or (d == best_d and s < best_s):
            best_d = d
            best_s = s
    return best_d, best_s


def polygon_to_json(poly: Polygon) -> list[list[float]]:
    """JSON form: array of [x, y] pairs in meters."""
    return [[p.x, p.y] for p in poly.vertices]


def polygon_from_json(data: object) -> Polygon:
    if not isinstance(data, list):
        raise ValidationError("polygon JSON must be an array of [x, y] pairs")
    pts = []
    for i, pair in enumerate(data):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValidationError(f"polygon vertex {i} must be an [x, y] pair")
        try:
            pts.append(Point2D(float(pair[0]), float(pair[1])))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"polygon vertex {i}: {exc}") from None
    return Polygon(pts)
