from __future__ import annotations

import sys
from pathlib import Path

import pytest

from evacnet.geometry import Point2D, Polygon, polygon_from_json
from evacnet.network import RoadNetwork, load_network

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))

import json


def load_fixture_network(name: str) -> RoadNetwork:
    return load_network((FIXTURES / name).read_bytes())


@pytest.fixture
def net_minimal() -> RoadNetwork:
    return load_fixture_network("net_minimal.json")


@pytest.fixture
def net_grid4() -> RoadNetwork:
    return load_fixture_network("net_grid4.json")


@pytest.fixture
def net_cross() -> RoadNetwork:
    return load_fixture_network("net_cross.json")


@pytest.fixture
def net_diamond() -> RoadNetwork:
    return load_fixture_network("net_diamond.json")


@pytest.fixture
def zone_square() -> Polygon:
    return polygon_from_json(json.loads((FIXTURES / "zone_square.json").read_text()))


@pytest.fixture
def unit_square() -> Polygon:
    return Polygon([Point2D(0, 0), Point2D(1, 0), Point2D(1, 1), Point2D(0, 1)])
