"""Zone exit computation.

An exit is a point where a directed road link crosses the zone boundary
from inside to outside, in travel direction. Links are straight segments
between their endpoint nodes; a link crossing a concave boundary several
times yields one exit per inside-to-outside crossing.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import EPSILON, Point2D, Polygon, point_in_polygon, segment_polygon_crossings
from .network import RoadNetwork


@dataclass(frozen=True)
class ExitPoint:
    id: str
    link_id: str
    offset: float  # fraction along the link's from->to direction
    location: Point2D


def compute_exits(net: RoadNetwork, zone: Polygon) -> list[ExitPoint]:
    """All exit points of the zone, sorted by (link id, offset).

    Ids are assigned as ``exit-<link_id>-<k>`` with k the 0-based index of
    the crossing among that link's exits. A zone crossed by no link yields
    an empty list.
    """
    exits: list[ExitPoint] = []
    for link_id in sorted(net.links):
        link = net.links[link_id]
        a = net.nodes[link.from_node].location
        b = net.nodes[link.to_node].location
        crossings = segment_polygon_crossings(a, b, zone)
        if not crossings:
            continue
        seg_len = a.distance_to(b)
        bounds = [0.0, *(t for _, t in crossings), 1.0]
        # insideness of each open interval between consecutive boundary hits;
        # None for zero-length intervals (crossing at a link endpoint)
        states: list[bool | None] = []
        for lo, hi in zip(bounds, bounds[1:]):
            if (hi - lo) * seg_len <= EPSILON:
                states.append(None)
            else:
                mid = 0.5 * (lo + hi)
                states.append(point_in_polygon(Point2D(a.x + mid * (b.x - a.x), a.y + mid * (b.y - a.y)), zone))
        k = 0
        for j, (pt, t) in enumerate(crossings):
            before = next((s for s in reversed(states[: j + 1]) if s is not None), None)
            after = next((s for s in states[j + 1 :] if s is not None), None)
            if before is None:
                # crossing at the link start: the from-node sits on the boundary,
                # which counts as inside
                before = point_in_polygon(a, zone)
            if after is None:
                # crossing at the link end: the link stops on the boundary and
                # never reaches the outside; a continuation link emits the exit
                after = point_in_polygon(b, zone)
            if before and not after:
                exits.append(ExitPoint(id=f"exit-{link_id}-{k}", link_id=link_id, offset=t, location=pt))
                k += 1
    return exits
