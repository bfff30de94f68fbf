from __future__ import annotations

import math

import pytest

from evacnet import serialize
from evacnet.errors import ValidationError
from evacnet.geometry import Point2D, Polygon, point_in_polygon
from evacnet.network import network_to_json
from evacnet.scenario import DEFAULT_ZONE_AREA, ScenarioSpec, default_zone, generate


def test_fixed_seed_reproduces_byte_identical_outputs():
    spec = ScenarioSpec(volunteers=25, seekers=15, seed=42)
    a = generate(spec)
    b = generate(spec)
    assert serialize.dumps(network_to_json(a.network)) == serialize.dumps(network_to_json(b.network))
    assert serialize.dumps(serialize.volunteers_to_json(a.volunteers)) == \
        serialize.dumps(serialize.volunteers_to_json(b.volunteers))
    assert serialize.dumps(serialize.seekers_to_json(a.seekers)) == \
        serialize.dumps(serialize.seekers_to_json(b.seekers))


def test_grid_counts():
    # r*c nodes; 2rc - r - c undirected edges, two directed links each
    scenario = generate(ScenarioSpec(volunteers=0, grid_rows=12, grid_cols=12))
    assert len(scenario.network.nodes) == 144
    assert len(scenario.network.links) == 2 * 264


def test_default_zone_area_is_about_30_km2():
    spec = ScenarioSpec(volunteers=0)
    zone = default_zone(spec)
    assert abs(zone.signed_area()) == pytest.approx(DEFAULT_ZONE_AREA, rel=1e-9)
    side = zone.vertices[1].x - zone.vertices[0].x
    assert side == pytest.approx(math.sqrt(30.0e6), rel=1e-9)
    assert side == pytest.approx(5477.0, abs=1.0)


def test_agents_inside_zone():
    scenario = generate(ScenarioSpec(volunteers=40, seekers=40, seed=7))
    for agent in list(scenario.volunteers) + list(scenario.seekers):
        assert point_in_polygon(agent.location, scenario.zone)


def test_seats_drawn_from_configured_choices():
    scenario = generate(ScenarioSpec(volunteers=60, seed=1, seat_choices=(2, 5)))
    assert {v.seats for v in scenario.volunteers} <= {2, 5}


def test_distinct_seeds_differ():
    specs = [ScenarioSpec(volunteers=10, seed=s) for s in range(10)]
    location_sets = {
        tuple((v.location.x, v.location.y) for v in generate(spec).volunteers)
        for spec in specs
    }
    assert len(location_sets) == 10


def test_zone_must_fit_grid():
    big = Polygon([Point2D(-10, 0), Point2D(9000, 0), Point2D(9000, 9000), Point2D(-10, 9000)])
    with pytest.raises(ValidationError, match="exceed the grid"):
        generate(ScenarioSpec(volunteers=0, zone=big))


def test_spec_validation():
    with pytest.raises(ValidationError):
        ScenarioSpec(volunteers=-1)
    with pytest.raises(ValidationError):
        ScenarioSpec(volunteers=0, grid_rows=1)
    with pytest.raises(ValidationError):
        ScenarioSpec(volunteers=0, seat_choices=(0,))
