"""Seeded synthetic scenarios: grid network, danger zone, agents.

The default zone is a centered square of about 30 km^2. Agent locations
are drawn uniformly inside the zone from a seeded generator, so a fixed
seed reproduces the scenario byte for byte.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .assignment import SeekerState
from .errors import ValidationError
from .geometry import Point2D, Polygon, point_in_polygon
from .network import Link, Node, RoadNetwork
from .planner import VolunteerState

DEFAULT_ZONE_AREA = 30.0e6  # m^2


@dataclass(frozen=True)
class ScenarioSpec:
    volunteers: int
    seekers: int = 0
    seed: int = 0
    grid_rows: int = 12
    grid_cols: int = 12
    cell: float = 500.0
    zone: Polygon | None = None  # default: centered square of ~30 km^2
    seat_choices: tuple[int, ...] = (1, 2, 3, 4)
    free_speed: float = 13.89
    lanes: int = 1
    flow_capacity: float = 600.0

    def __post_init__(self) -> None:
        if self.volunteers < 0 or self.seekers < 0:
            raise ValidationError("agent counts must be >= 0")
        if self.grid_rows < 2 or self.grid_cols < 2 or self.grid_rows > 100 or self.grid_cols > 100:
            raise ValidationError("grid dimensions must be in [2, 100]")
        if not self.cell > 0.0:
            raise ValidationError(f"cell must be > 0, got {self.cell}")
        if not self.seat_choices or any(not (isinstance(s, int) and 1 <= s <= 8) for s in self.seat_choices):
            raise ValidationError(f"seat_choices must be integers in [1, 8], got {self.seat_choices!r}")

    @property
    def extent(self) -> tuple[float, float]:
        return (self.grid_cols - 1) * self.cell, (self.grid_rows - 1) * self.cell


@dataclass(frozen=True)
class Scenario:
    network: RoadNetwork
    zone: Polygon
    volunteers: tuple[VolunteerState, ...]
    seekers: tuple[SeekerState, ...]


def default_zone(spec: ScenarioSpec) -> Polygon:
    side = math.sqrt(DEFAULT_ZONE_AREA)
    w, h = spec.extent
    cx, cy = w / 2.0, h / 2.0
    half = side / 2.0
    return Polygon([
        Point2D(cx - half, cy - half),
        Point2D(cx + half, cy - half),
        Point2D(cx + half, cy + half),
        Point2D(cx - half, cy + half),
    ])


def _node_id(r: int, c: int) -> str:
    return f"n{r:02d}-{c:02d}"


def grid_network(spec: ScenarioSpec) -> RoadNetwork:
    """Bidirectional grid: two directed links per undirected edge."""
    nodes = [
        Node(_node_id(r, c), Point2D(c * spec.cell, r * spec.cell))
        for r in range(spec.grid_rows)
        for c in range(spec.grid_cols)
    ]
    links: list[Link] = []

    def add_pair(r1: int, c1: int, r2: int, c2: int) -> None:
        a, b = _node_id(r1, c1), _node_id(r2, c2)
        for fr, to in ((a, b), (b, a)):
            links.append(Link(
                id=f"l{fr[1:]}>{to[1:]}",
                from_node=fr,
                to_node=to,
                length=spec.cell,
                free_speed=spec.free_speed,
                lanes=spec.lanes,
                flow_capacity=spec.flow_capacity,
            ))

    for r in range(spec.grid_rows):
        for c in range(spec.grid_cols):
            if c + 1 < spec.grid_cols:
                add_pair(r, c, r, c + 1)
            if r + 1 < spec.grid_rows:
                add_pair(r, c, r + 1, c)
    return RoadNetwork(nodes, links)


def _sample_in_zone(rng: random.Random, zone: Polygon) -> Point2D:
    min_x, min_y, max_x, max_y = zone.bounds()
    while True:
        p = Point2D(rng.uniform(min_x, max_x), rng.uniform(min_y, max_y))
        if point_in_polygon(p, zone):
            return p


def generate(spec: ScenarioSpec) -> Scenario:
    """Build the scenario for a spec; bit-reproducible for a fixed seed."""
    zone = spec.zone if spec.zone is not None else default_zone(spec)
    w, h = spec.extent
    min_x, min_y, max_x, max_y = zone.bounds()
    if min_x < 0.0 or min_y < 0.0 or max_x > w or max_y > h:
        raise ValidationError(
            f"zone bounds ({min_x:g}, {min_y:g})-({max_x:g}, {max_y:g}) exceed the grid extent {w:g} x {h:g}"
        )
    net = grid_network(spec)
    rng = random.Random(spec.seed)
    vol_width = max(1, len(str(spec.volunteers)))
    volunteers = []
    for i in range(spec.volunteers):
        loc = _sample_in_zone(rng, zone)
        seats = rng.choice(spec.seat_choices)
        volunteers.append(VolunteerState(f"v{i + 1:0{vol_width}d}", loc, seats))
    seeker_width = max(1, len(str(spec.seekers)))
    seekers = [
        SeekerState(f"s{i + 1:0{seeker_width}d}", _sample_in_zone(rng, zone), 1)
        for i in range(spec.seekers)
    ]
    return Scenario(network=net, zone=zone, volunteers=tuple(volunteers), seekers=tuple(seekers))
