"""JSON wire formats shared by the CLI, the service, and the tests.

Everything serializes deterministically: dictionaries are emitted with
sorted keys and lists in a documented order, so two equal values always
produce identical bytes.
"""
from __future__ import annotations

import json
import math
from typing import Sequence

from .assignment import PickupPlan, PickupStop, SeekerState
from .errors import ValidationError
from .exits import ExitPoint
from .geometry import Point2D, Polyline
from .network import Route
from .planner import CongestionEstimate, PlanResult, RouteAssignment, VolunteerState
from .simulator import SimResult


def dumps(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def as_finite_number(value: object, ctx: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{ctx}: expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ValidationError(f"{ctx}: expected a finite number, got {value!r}")
    return out


# -- agents -----------------------------------------------------------------

def volunteers_to_json(volunteers: Sequence[VolunteerState]) -> list[dict]:
    return [
        {"id": v.id, "x": v.location.x, "y": v.location.y, "seats": v.seats}
        for v in volunteers
    ]


def volunteers_from_json(data: object) -> list[VolunteerState]:
    if not isinstance(data, list):
        raise ValidationError("volunteers JSON must be an array")
    out = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise ValidationError(f"volunteer {i} must be an object")
        out.append(VolunteerState(
            id=str(item.get("id", f"v{i + 1}")),
            location=Point2D(as_finite_number(item.get("x"), f"volunteer {i}"), as_finite_number(item.get("y"), f"volunteer {i}")),
            seats=int(item.get("seats", 0)),
        ))
    return out


def seekers_to_json(seekers: Sequence[SeekerState]) -> list[dict]:
    return [
        {"id": s.id, "x": s.location.x, "y": s.location.y, "party_size": s.party_size}
        for s in seekers
    ]


def seekers_from_json(data: object) -> list[SeekerState]:
    if not isinstance(data, list):
        raise ValidationError("seekers JSON must be an array")
    out = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise ValidationError(f"seeker {i} must be an object")
        out.append(SeekerState(
            id=str(item.get("id", f"s{i + 1}")),
            location=Point2D(as_finite_number(item.get("x"), f"seeker {i}"), as_finite_number(item.get("y"), f"seeker {i}")),
            party_size=int(item.get("party_size", 1)),
        ))
    return out


# -- exits ------------------------------------------------------------------

def exits_to_json(exits: Sequence[ExitPoint]) -> list[dict]:
    return [
        {"id": e.id, "link_id": e.link_id, "offset": e.offset, "x": e.location.x, "y": e.location.y}
        for e in exits
    ]


def exits_from_json(data: object) -> list[ExitPoint]:
    if not isinstance(data, list):
        raise ValidationError("exits JSON must be an array")
    return [
        ExitPoint(
            id=str(item["id"]),
            link_id=str(item["link_id"]),
            offset=as_finite_number(item["offset"], "exit"),
            location=Point2D(as_finite_number(item["x"], "exit"), as_finite_number(item["y"], "exit")),
        )
        for item in data
    ]


# -- congestion ---------------------------------------------------------------

def congestion_to_json(est: CongestionEstimate) -> dict:
    return dict(sorted(est.multipliers.items()))


def congestion_from_json(data: object) -> CongestionEstimate:
    if not isinstance(data, dict):
        raise ValidationError("congestion JSON must be an object of link id -> multiplier")
    return CongestionEstimate({str(k): as_finite_number(v, f"congestion['{k}']") for k, v in data.items()})


# -- plans --------------------------------------------------------------------

def _route_assignment_to_json(ra: RouteAssignment) -> dict:
    return {
        "volunteer_id": ra.volunteer_id,
        "exit_id": ra.exit_id,
        "nodes": list(ra.route.nodes),
        "links": list(ra.route.links),
        "terminal_link": ra.route.terminal_link,
        "terminal_offset": ra.route.terminal_offset,
        "polyline": [[p.x, p.y] for p in ra.route_polyline.points] if ra.route_polyline else None,
        "travel_time": ra.travel_time,
    }


def plan_to_json(plan: PlanResult) -> dict:
    return {
        "routes": [_route_assignment_to_json(ra) for ra in plan.assignments],
        "unreachable": list(plan.unreachable),
    }


def plan_from_json(data: object) -> PlanResult:
    if not isinstance(data, dict) or "routes" not in data:
        raise ValidationError("plan JSON must be an object with 'routes'")
    assignments = []
    for item in data["routes"]:
        route = Route(
            nodes=tuple(str(n) for n in item["nodes"]),
            links=tuple(str(l) for l in item["links"]),
            terminal_link=None if item["terminal_link"] is None else str(item["terminal_link"]),
            terminal_offset=as_finite_number(item["terminal_offset"], "route"),
        )
        poly = item.get("polyline")
        polyline = Polyline([Point2D(as_finite_number(x, "polyline"), as_finite_number(y, "polyline")) for x, y in poly]) if poly else None
        assignments.append(RouteAssignment(
            volunteer_id=str(item["volunteer_id"]),
            exit_id=None if item["exit_id"] is None else str(item["exit_id"]),
            route=route,
            route_polyline=polyline,
            travel_time=as_finite_number(item["travel_time"], "route"),
        ))
    return PlanResult(tuple(assignments), tuple(str(v) for v in data.get("unreachable", [])))


def pickups_to_json(plan: PickupPlan) -> dict:
    return {
        "assignments": dict(sorted(plan.assignments.items())),
        "stops": {
            vid: [{"seeker_id": st.seeker_id, "x": st.point.x, "y": st.point.y, "s": st.s} for st in stops]
            for vid, stops in sorted(plan.stops.items())
        },
        "unserved": list(plan.unserved),
    }


def pickups_from_json(data: object) -> PickupPlan:
    if not isinstance(data, dict):
        raise ValidationError("pickup plan JSON must be an object")
    stops = {
        str(vid): tuple(
            PickupStop(str(st["seeker_id"]), Point2D(as_finite_number(st["x"], "stop"), as_finite_number(st["y"], "stop")), as_finite_number(st["s"], "stop"))
            for st in entries
        )
        for vid, entries in data.get("stops", {}).items()
    }
    return PickupPlan(
        assignments={str(k): str(v) for k, v in data.get("assignments", {}).items()},
        stops=stops,
        unserved=tuple(str(s) for s in data.get("unserved", [])),
    )


# -- simulation results --------------------------------------------------------

def sim_result_to_json(result: SimResult) -> dict:
    return {
        "evac_times": dict(sorted(result.evac_times.items())),
        "stranded": list(result.stranded),
        "mean_evac": None if math.isnan(result.mean_evac) else result.mean_evac,
        "std_evac": None if math.isnan(result.std_evac) else result.std_evac,
        "unserved_seekers": result.unserved_seekers,
        "congestion": congestion_to_json(result.congestion),
        "traversals": {lid: [count, total] for lid, (count, total) in sorted(result.traversals.items())},
    }
