from __future__ import annotations

import random

import pytest

from evacnet.exits import compute_exits
from evacnet.geometry import Point2D, Polygon, point_to_polyline, Polyline
from evacnet.network import Link, Node, RoadNetwork
from evacnet.scenario import ScenarioSpec, grid_network

from oracles import brute_force_exits


def _net(nodes, links):
    return RoadNetwork(nodes, links)


def _link(lid, fr, to, length):
    return Link(lid, fr, to, length, 10.0, 1, 600.0)


def _km_square():
    return Polygon([Point2D(0, 0), Point2D(1000, 0), Point2D(1000, 1000), Point2D(0, 1000)])


def test_disjoint_geometry_yields_nothing(net_minimal):
    zone = Polygon([Point2D(5000, 5000), Point2D(6000, 5000), Point2D(6000, 6000), Point2D(5000, 6000)])
    assert compute_exits(net_minimal, zone) == []


def test_single_crossing_link():
    net = _net(
        [Node("in", Point2D(500, 500)), Node("out", Point2D(1500, 500))],
        [_link("l1", "in", "out", 1000.0)],
    )
    exits = compute_exits(net, _km_square())
    assert len(exits) == 1
    e = exits[0]
    assert e.id == "exit-l1-0"
    assert e.offset == pytest.approx(0.5)
    assert e.location == Point2D(1000.0, 500.0)


def test_reversed_link_is_an_entrance_not_an_exit():
    net = _net(
        [Node("in", Point2D(500, 500)), Node("out", Point2D(1500, 500))],
        [_link("l1", "out", "in", 1000.0)],
    )
    assert compute_exits(net, _km_square()) == []


def test_cross_fixture_has_four_exits(net_cross, zone_square):
    exits = compute_exits(net_cross, zone_square)
    assert [e.id for e in exits] == ["exit-lce-0", "exit-lcn-0", "exit-lcs-0", "exit-lcw-0"]
    assert all(e.offset == pytest.approx(0.5) for e in exits)
    verts = [(p.x, p.y) for p in zone_square.vertices]
    oracle = brute_force_exits(net_cross, verts)
    ours = {(e.link_id, round(e.location.x, 6), round(e.location.y, 6)) for e in exits}
    assert ours == oracle


def test_concave_zone_multiple_crossings_one_link():
    # U-shaped zone: the link leaves through the notch, re-enters the right
    # arm, and leaves again through the far wall -> two exits
    zone = Polygon([
        Point2D(0, 0), Point2D(700, 0), Point2D(700, 500), Point2D(500, 500),
        Point2D(500, 200), Point2D(200, 200), Point2D(200, 500), Point2D(0, 500),
    ])
    net = _net(
        [Node("a", Point2D(50, 400)), Node("b", Point2D(850, 400))],
        [_link("l1", "a", "b", 800.0)],
    )
    exits = compute_exits(net, zone)
    assert [e.id for e in exits] == ["exit-l1-0", "exit-l1-1"]
    assert [e.offset for e in exits] == [pytest.approx(150 / 800), pytest.approx(650 / 800)]


def test_from_node_exactly_on_boundary_emits_offset_zero():
    net = _net(
        [Node("edge", Point2D(1000, 500)), Node("out", Point2D(2000, 500))],
        [_link("l1", "edge", "out", 1000.0)],
    )
    exits = compute_exits(net, _km_square())
    assert len(exits) == 1
    assert exits[0].offset == 0.0


def test_link_ending_on_boundary_yields_nothing():
    net = _net(
        [Node("in", Point2D(500, 500)), Node("edge", Point2D(1000, 500))],
        [_link("l1", "in", "edge", 500.0)],
    )
    assert compute_exits(net, _km_square()) == []


def test_exit_locations_lie_on_zone_boundary():
    spec = ScenarioSpec(volunteers=0, grid_rows=6, grid_cols=6, cell=400.0)
    net = grid_network(spec)
    zone = Polygon([Point2D(310, 250), Point2D(1700, 410), Point2D(1500, 1800), Point2D(200, 1500)])
    exits = compute_exits(net, zone)
    assert exits
    boundary = Polyline(list(zone.vertices) + [zone.vertices[0]])
    for e in exits:
        d, _ = point_to_polyline(e.location, boundary)
        assert d < 1e-6
        # location is the interpolation of the link endpoints at the offset
        link = net.links[e.link_id]
        a = net.nodes[link.from_node].location
        b = net.nodes[link.to_node].location
        interp = Point2D(a.x + e.offset * (b.x - a.x), a.y + e.offset * (b.y - a.y))
        assert e.location.distance_to(interp) < 1e-6


def test_random_quadrilaterals_match_brute_force_oracle():
    rng = random.Random(2024)
    spec = ScenarioSpec(volunteers=0, grid_rows=7, grid_cols=7, cell=300.0)
    net = grid_network(spec)
    w = h = 6 * 300.0
    for _ in range(30):
        verts = _random_simple_quad(rng, w, h)
        zone = Polygon([Point2D(x, y) for x, y in verts])
        exits = compute_exits(net, zone)
        ours = {(e.link_id, round(e.location.x, 6), round(e.location.y, 6)) for e in exits}
        assert ours == brute_force_exits(net, verts)


def _random_simple_quad(rng: random.Random, w: float, h: float) -> list[tuple[float, float]]:
    import math
    while True:
        pts = [(rng.uniform(0.05 * w, 0.95 * w), rng.uniform(0.05 * h, 0.95 * h)) for _ in range(4)]
        cx = sum(p[0] for p in pts) / 4
        cy = sum(p[1] for p in pts) / 4
        pts.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
        try:
            Polygon([Point2D(x, y) for x, y in pts])
        except Exception:
            continue
        return pts
