"""Seeker-to-volunteer pickup assignment.

Seekers are eligible for a volunteer when they stand within a configured
distance of the volunteer's route polyline; the vehicle never detours, the
seeker walks to the nearest point of the route. The matcher maximizes the
number of passengers picked up subject to seat capacity, placing whole
parties atomically on one vehicle.

The solver augments like a capacitated bipartite matcher: seekers are
processed in ascending id order, candidate volunteers in ascending
(distance, volunteer id) order, and an over-full volunteer may relocate one
of its parties to make room. With unit party sizes this is exact maximum
matching; larger parties keep the same deterministic augmentation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import UnknownIdError, ValidationError
from .geometry import EPSILON, Point2D, point_to_polyline
from .network import RoadNetwork
from .planner import RouteAssignment, VolunteerState


@dataclass(frozen=True)
class SeekerState:
    """A car-less person (or party) requesting a ride out of the zone."""

    id: str
    location: Point2D
    party_size: int = 1

    def __post_init__(self) -> None:
        if not (isinstance(self.party_size, int) and self.party_size >= 1):
            raise ValidationError(f"seeker '{self.id}': party_size must be a positive integer, got {self.party_size!r}")


@dataclass(frozen=True)
class AssignmentConfig:
    max_pickup_distance: float = 200.0  # meters

    def __post_init__(self) -> None:
        if not self.max_pickup_distance > 0.0:
            raise ValidationError(f"max_pickup_distance must be > 0, got {self.max_pickup_distance}")


class EligiblePair(NamedTuple):
    seeker_id: str
    volunteer_id: str
    distance: float  # meters from seeker to the route
    s: float         # arc-length of the nearest route point
    point: Point2D   # the pickup point on the route


@dataclass(frozen=True)
class PickupStop:
    seeker_id: str
    point: Point2D
    s: float


@dataclass(frozen=True)
class PickupPlan:
    assignments: Mapping[str, str]                    # seeker id -> volunteer id
    stops: Mapping[str, tuple[PickupStop, ...]]       # volunteer id -> stops ordered by s
    unserved: tuple[str, ...]


def eligible_pairs(
    routes: Sequence[RouteAssignment],
    seekers: Sequence[SeekerState],
    cfg: AssignmentConfig | None = None,
) -> list[EligiblePair]:
    """Every (seeker, volunteer) pair within pickup distance of the route,
    sorted by (seeker id, volunteer id). Zero-length routes never match."""
    cfg = cfg or AssignmentConfig()
    pairs: list[EligiblePair] = []
    for seeker in seekers:
        for ra in routes:
            if ra.route_polyline is None:
                continue
            d, s = point_to_polyline(seeker.location, ra.route_polyline)
            if d <= cfg.max_pickup_distance:
                pairs.append(EligiblePair(seeker.id, ra.volunteer_id, d, s, ra.route_polyline.point_at(s)))
    pairs.sort(key=lambda p: (p.seeker_id, p.volunteer_id))
    return pairs


def assign(
    pairs: Sequence[EligiblePair],
    volunteers: Sequence[VolunteerState],
    seekers: Sequence[SeekerState],
) -> PickupPlan:
    """Match seekers to volunteers maximizing assigned passengers.

    Every seeker ends up in exactly one of assignments/unserved; no
    volunteer exceeds its seats. Deterministic: identical inputs yield the
    identical plan.
    """
    vol_by_id = {v.id: v for v in volunteers}
    seeker_by_id = {s.id: s for s in seekers}
    candidates: dict[str, list[EligiblePair]] = {}
    for p in pairs:
        if p.seeker_id not in seeker_by_id:
            raise UnknownIdError(f"pair references unknown seeker '{p.seeker_id}'")
        if p.volunteer_id not in vol_by_id:
            raise UnknownIdError(f"pair references unknown volunteer '{p.volunteer_id}'")
        candidates.setdefault(p.seeker_id, []).append(p)
    for lst in candidates.values():
        lst.sort(key=lambda p: (p.distance, p.volunteer_id))

    remaining = {v.id: v.seats for v in volunteers}
    assigned: dict[str, str] = {}
    riders: dict[str, list[str]] = {v.id: [] for v in volunteers}
    pair_used: dict[str, EligiblePair] = {}

    def _put(sid: str, pair: EligiblePair) -> None:
        vid = pair.volunteer_id
        assigned[sid] = vid
        riders[vid].append(sid)
        remaining[vid] -= seeker_by_id[sid].party_size
        pair_used[sid] = pair

    def _take(sid: str) -> None:
        vid = assigned.pop(sid)
        riders[vid].remove(sid)
        remaining[vid] += seeker_by_id[sid].party_size
        del pair_used[sid]

    def _place(sid: str, visited: set[str]) -> bool:
        size = seeker_by_id[sid].party_size
        for pair in candidates.get(sid, ()):
            vid = pair.volunteer_id
            if vid in visited:
                continue
            visited.add(vid)
            if remaining[vid] >= size:
                _put(sid, pair)
                return True
            for other in sorted(riders[vid]):
                if remaining[vid] + seeker_by_id[other].party_size < size:
                    continue
                restore = pair_used[other]
                _take(other)
                if _place(other, visited):
                    _put(sid, pair)
                    return True
                _put(other, restore)
        return False

    for sid in sorted(candidates):
        _place(sid, set())

    stops: dict[str, tuple[PickupStop, ...]] = {}
    for vid in sorted(riders):
        if not riders[vid]:
            continue
        vol_stops = [
            PickupStop(sid, pair_used[sid].point, pair_used[sid].s) for sid in riders[vid]
        ]
        vol_stops.sort(key=lambda st: (st.s, st.seeker_id))
        stops[vid] = tuple(vol_stops)
    unserved = tuple(sorted(s.id for s in seekers if s.id not in assigned))
    return PickupPlan(assignments=dict(sorted(assigned.items())), stops=stops, unserved=unserved)


class ScheduledStop(NamedTuple):
    seeker_id: str
    link_index: int   # index into the vehicle's full link sequence (terminal included)
    link_id: str
    link_fraction: float
    s: float
    dwell: float      # seconds


def inject_stops(
    net: RoadNetwork,
    route: RouteAssignment,
    stops: Sequence[PickupStop],
    dwell: float = 30.0,
) -> tuple[ScheduledStop, ...]:
    """Map pickup stops onto the links of a route.

    The route is unchanged geometrically; each stop lands on its containing
    link with ``dwell`` extra seconds for the simulator. Stops must arrive
    sorted ascending by arc-length and lie within the route's length.
    """
    if dwell < 0.0:
        raise ValidationError(f"dwell must be >= 0, got {dwell}")
    if not stops:
        return ()
    for prev, cur in zip(stops, stops[1:]):
        if cur.s < prev.s:
            raise ValidationError("stops must be sorted ascending by arc-length")
    locs = [net.node(n).location for n in route.route.nodes]
    spans: list[float] = [locs[i].distance_to(locs[i + 1]) for i in range(len(locs) - 1)]
    link_ids = list(route.route.links)
    if route.route.terminal_link is not None:
        term = net.link(route.route.terminal_link)
        term_geo = net.node(term.from_node).location.distance_to(net.node(term.to_node).location)
        spans.append(route.route.terminal_offset * term_geo)
        link_ids.append(route.route.terminal_link)
    total = sum(spans)
    if not any(span > EPSILON for span in spans):
        raise ValidationError("route has no extent to place stops on")
    cum = [0.0]
    for span in spans:
        cum.append(cum[-1] + span)
    placed: list[ScheduledStop] = []
    for stop in stops:
        if stop.s < -EPSILON or stop.s > total + EPSILON:
            raise ValidationError(f"stop for '{stop.seeker_id}' at s={stop.s} beyond route length {total:g}")
        idx = None
        for i, span in enumerate(spans):
            if span > EPSILON and stop.s <= cum[i + 1] + EPSILON:
                idx = i
                break
        if idx is None:
            idx = max(i for i, span in enumerate(spans) if span > EPSILON)
        frac_span = min(1.0, max(0.0, (stop.s - cum[idx]) / spans[idx]))
        if route.route.terminal_link is not None and idx == len(spans) - 1:
            frac_link = frac_span * route.route.terminal_offset
        else:
            frac_link = frac_span
        placed.append(ScheduledStop(stop.seeker_id, idx, link_ids[idx], frac_link, stop.s, dwell))
    return tuple(placed)


def dwell_by_link_index(stops: Iterable[ScheduledStop]) -> dict[int, float]:
    """Total extra dwell seconds per link index; stops on one link accumulate."""
    acc: dict[int, float] = {}
    for st in stops:
        acc[st.link_index] = acc.get(st.link_index, 0.0) + st.dwell
    return acc
