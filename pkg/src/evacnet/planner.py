"""Per-volunteer route planning.

For each volunteer we compute the best route to every exit under the
current congestion estimate and keep the exit with the shortest travel
time. Volunteers already outside the zone get a zero-length plan and are
excluded from pickup duty.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ValidationError
from .exits import ExitPoint
from .geometry import EPSILON, Point2D, Polygon, Polyline, point_in_polygon
from .network import Link, PathLabel, RoadNetwork, Route, single_source

MAX_SEATS = 8


@dataclass(frozen=True)
class VolunteerState:
    """A volunteer driver: position and spare passenger capacity."""

    id: str
    location: Point2D
    seats: int

    def __post_init__(self) -> None:
        if not (isinstance(self.seats, int) and 0 <= self.seats <= MAX_SEATS):
            raise ValidationError(f"volunteer '{self.id}': seats must be an integer in [0, {MAX_SEATS}], got {self.seats!r}")


class CongestionEstimate:
    """Per-link speed multipliers in (0, 1]; links not listed are uncongested."""

    __slots__ = ("multipliers",)

    def __init__(self, multipliers: Mapping[str, float] | None = None) -> None:
        mults = dict(multipliers or {})
        for link_id, m in mults.items():
            if not 0.0 < m <= 1.0:
                raise ValidationError(f"congestion multiplier for '{link_id}' must be in (0, 1], got {m}")
        self.multipliers = mults

    @classmethod
    def unit(cls) -> "CongestionEstimate":
        return cls()

    def multiplier(self, link_id: str) -> float:
        return self.multipliers.get(link_id, 1.0)

    def link_time(self, link: Link) -> float:
        return link.length / (link.free_speed * self.multiplier(link.id))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CongestionEstimate) and self.multipliers == other.multipliers

    def __repr__(self) -> str:
        return f"CongestionEstimate({self.multipliers!r})"


@dataclass(frozen=True)
class RouteAssignment:
    """A volunteer's planned evacuation: chosen exit, route, and time.

    ``exit_id`` and ``route_polyline`` are None for a zero-length plan
    (volunteer already outside the zone).
    """

    volunteer_id: str
    exit_id: str | None
    route: Route
    route_polyline: Polyline | None
    travel_time: float


@dataclass(frozen=True)
class PlanResult:
    assignments: tuple[RouteAssignment, ...]
    unreachable: tuple[str, ...]


def snap_to_network(net: RoadNetwork, p: Point2D) -> str:
    """Id of the node nearest to p; ties go to the smallest node id."""
    if not net.nodes:
        raise ValidationError("cannot snap to an empty network")
    best_id = None
    best_d = None
    for nid in net.nodes:
        d = net.nodes[nid].location.distance_to(p)
        if best_d is None or d < best_d or (d == best_d and nid < best_id):
            best_id, best_d = nid, d
    return best_id


def build_route_polyline(net: RoadNetwork, route: Route, terminal_location: Point2D | None) -> Polyline | None:
    """Concatenated node locations plus the exit location, deduplicated.

    Returns None when the route is degenerate (fewer than two distinct
    points, e.g. a zero-length plan).
    """
    raw = [net.node(n).location for n in route.nodes]
    if terminal_location is not None:
        raw.append(terminal_location)
    pts: list[Point2D] = []
    for p in raw:
        if pts and pts[-1].distance_to(p) <= EPSILON:
            continue
        pts.append(p)
    if len(pts) < 2:
        return None
    return Polyline(pts)


def plan_routes(
    net: RoadNetwork,
    exits: Sequence[ExitPoint],
    volunteers: Sequence[VolunteerState],
    congestion: CongestionEstimate | None = None,
    zone: Polygon | None = None,
) -> PlanResult:
    """Assign each volunteer the reachable exit with minimum travel time.

    Ties go to the smallest exit id. Volunteers whose snapped node cannot
    reach any exit are reported in ``unreachable``. When ``zone`` is given,
    volunteers located outside it get a zero-length plan instead of a route.
    """
    if not exits:
        raise ValidationError("no exits for zone")
    if not volunteers:
        raise ValidationError("no volunteers to plan for")
    congestion = congestion or CongestionEstimate.unit()
    link_time = congestion.link_time
    label_cache: dict[str, dict[str, PathLabel]] = {}
    assignments: list[RouteAssignment] = []
    unreachable: list[str] = []
    for vol in volunteers:
        origin = snap_to_network(net, vol.location)
        if zone is not None and not point_in_polygon(vol.location, zone):
            route = Route(nodes=(origin,), links=(), terminal_link=None, terminal_offset=0.0)
            assignments.append(RouteAssignment(vol.id, None, route, None, 0.0))
            continue
        labels = label_cache.get(origin)
        if labels is None:
            labels = single_source(net, origin, link_time)
            label_cache[origin] = labels
        best: tuple[tuple[float, str], ExitPoint, PathLabel] | None = None
        for ex in exits:
            link = net.links[ex.link_id]
            label = labels.get(link.from_node)
            if label is None:
                continue
            key = (label.time + ex.offset * link_time(link), ex.id)
            if best is None or key < best[0]:
                best = (key, ex, label)
        if best is None:
            unreachable.append(vol.id)
            continue
        (time, _), ex, label = best
        route = Route(nodes=label.nodes, links=label.links, terminal_link=ex.link_id, terminal_offset=ex.offset)
        polyline = build_route_polyline(net, route, ex.location)
        assignments.append(RouteAssignment(vol.id, ex.id, route, polyline, time))
    return PlanResult(tuple(assignments), tuple(unreachable))
