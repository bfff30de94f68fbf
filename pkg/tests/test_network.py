from __future__ import annotations

import json
import math
import random

import pytest

from evacnet.errors import DuplicateIdError, UnknownIdError, ValidationError
from evacnet.geometry import Point2D
from evacnet.network import (
    Link,
    Node,
    RoadNetwork,
    free_flow_time,
    load_network,
    network_to_json,
    shortest_path,
    single_source,
)

from oracles import floyd_warshall


def _mklink(lid, fr, to, length=1000.0, speed=10.0, lanes=1, cap=600.0):
    return Link(lid, fr, to, length, speed, lanes, cap)


class TestLoadNetwork:
    def test_minimal_document(self, net_minimal):
        assert len(net_minimal.nodes) == 2
        assert len(net_minimal.links) == 1

    def test_dangling_endpoint_names_the_node(self):
        doc = {
            "nodes": [{"id": "n1", "x": 0, "y": 0}],
            "links": [{"id": "l1", "from": "n1", "to": "n9", "length": 1.0,
                       "free_speed": 1.0, "lanes": 1, "flow_capacity": 1.0}],
        }
        with pytest.raises(ValidationError, match="n9"):
            load_network(json.dumps(doc))

    def test_round_trip(self, net_grid4):
        again = load_network(json.dumps(network_to_json(net_grid4)))
        assert again == net_grid4

    def test_malformed_json_raises_decode_error(self):
        with pytest.raises(json.JSONDecodeError):
            load_network(b"{not json")

    def test_duplicate_ids_rejected(self):
        nodes = [Node("a", Point2D(0, 0)), Node("b", Point2D(10, 0))]
        with pytest.raises(DuplicateIdError):
            RoadNetwork(nodes, [_mklink("l", "a", "b", 10), _mklink("l", "b", "a", 10)])
        with pytest.raises(DuplicateIdError):
            RoadNetwork(nodes + [Node("a", Point2D(5, 5))], [])

    def test_link_shorter_than_straight_line_rejected(self):
        nodes = [Node("a", Point2D(0, 0)), Node("b", Point2D(100, 0))]
        with pytest.raises(ValidationError, match="straight line"):
            RoadNetwork(nodes, [_mklink("l1", "a", "b", length=50.0)])

    def test_nonpositive_fields_rejected(self):
        nodes = [Node("a", Point2D(0, 0)), Node("b", Point2D(1, 0))]
        with pytest.raises(ValidationError):
            RoadNetwork(nodes, [_mklink("l1", "a", "b", length=-5.0)])
        with pytest.raises(ValidationError):
            RoadNetwork(nodes, [_mklink("l1", "a", "b", length=2.0, speed=0.0)])


class TestFreeFlowTime:
    def test_arithmetic(self):
        assert free_flow_time(_mklink("l", "a", "b", 100.0, 10.0)) == 10.0

    def test_tiny_length_stays_positive(self):
        assert free_flow_time(_mklink("l", "a", "b", 0.001, 10.0)) > 0.0

    def test_fixture_link(self, net_minimal):
        assert free_flow_time(net_minimal.links["l1"]) == pytest.approx(36.0, abs=0.01)


def _free_flow(net):
    return lambda link: free_flow_time(link)


class TestShortestPath:
    def test_target_at_origin_offset_zero(self, net_minimal):
        result = shortest_path(net_minimal, "n1", [("l1", 0.0)], _free_flow(net_minimal))
        route, time = result[("l1", 0.0)]
        assert time == 0.0
        assert route.nodes == ("n1",)
        assert route.links == ()
        assert route.is_empty

    def test_diamond_picks_fast_branch(self, net_diamond):
        times = {"ab": 1.0, "bd": 1.0, "ac": 5.0, "cd": 1.0}
        result = shortest_path(net_diamond, "A", [("cd", 1.0), ("bd", 1.0)], lambda l: times[l.id])
        route, time = result[("bd", 1.0)]
        assert route.nodes == ("A", "B")
        assert time == pytest.approx(2.0)
        route_c, time_c = result[("cd", 1.0)]
        assert route_c.nodes == ("A", "C")
        assert time_c == pytest.approx(6.0)

    def test_unknown_origin_is_lookup_error(self, net_minimal):
        with pytest.raises(UnknownIdError):
            shortest_path(net_minimal, "nope", [("l1", 0.0)], _free_flow(net_minimal))

    def test_unreachable_target_omitted(self, net_minimal):
        # n2 has no outgoing links, so l1 (from n1) is unreachable from n2
        result = shortest_path(net_minimal, "n2", [("l1", 0.5)], _free_flow(net_minimal))
        assert result == {}

    def test_nonpositive_link_time_rejected(self, net_minimal):
        with pytest.raises(ValidationError):
            single_source(net_minimal, "n1", lambda l: 0.0)

    def test_lexicographic_tie_break(self, net_grid4):
        # a->b->d and a->c->d tie exactly; the node sequence a,b,d is smaller
        labels = single_source(net_grid4, "a", lambda l: 1.0)
        assert labels["d"].nodes == ("a", "b", "d")


def _random_graph(rng: random.Random, n_nodes: int):
    ids = [f"n{i:02d}" for i in range(n_nodes)]
    nodes = [Node(nid, Point2D(float(i), 0.0)) for i, nid in enumerate(ids)]
    links = []
    weights = {}
    k = 0
    for u in ids:
        for v in ids:
            if u != v and rng.random() < 0.15:
                lid = f"e{k:03d}"
                k += 1
                links.append(Link(lid, u, v, 10_000.0, 1.0, 1, 600.0))
                weights[lid] = float(rng.randint(1, 20))
    return RoadNetwork(nodes, links), ids, links, weights


class TestAgainstFloydWarshall:
    def test_random_graphs_match_all_pairs_oracle(self):
        rng = random.Random(1234)
        for trial in range(12):
            n = rng.randint(5, 50)
            net, ids, links, weights = _random_graph(rng, n)
            oracle = floyd_warshall(ids, [(l.from_node, l.to_node, weights[l.id]) for l in links])
            origin = rng.choice(ids)
            labels = single_source(net, origin, lambda l: weights[l.id])
            for v in ids:
                expected = oracle[(origin, v)]
                if expected is math.inf:
                    assert v not in labels
                else:
                    assert labels[v].time == expected  # integer weights: exact

    def test_triangle_inequality(self):
        rng = random.Random(99)
        net, ids, links, weights = _random_graph(rng, 25)
        lt = lambda l: weights[l.id]
        dist = {u: {v: lab.time for v, lab in single_source(net, u, lt).items()} for u in ids}
        samples = [(rng.choice(ids), rng.choice(ids), rng.choice(ids)) for _ in range(200)]
        for a, b, c in samples:
            if c in dist[a] and b in dist[a] and c in dist[b]:
                assert dist[a][c] <= dist[a][b] + dist[b][c] + 1e-9

    def test_route_time_equals_sum_of_link_times(self):
        rng = random.Random(7)
        net, ids, links, weights = _random_graph(rng, 30)
        lt = lambda l: weights[l.id]
        by_pair = {}
        for l in links:
            key = (l.from_node, l.to_node)
            if key not in by_pair or weights[l.id] < weights[by_pair[key].id]:
                by_pair[key] = l
        origin = ids[0]
        labels = single_source(net, origin, lt)
        for v, label in labels.items():
            total = sum(weights[lid] for lid in label.links)
            assert abs(total - label.time) < 1e-6
            # the label's links really connect its nodes
            for (u, w), lid in zip(zip(label.nodes, label.nodes[1:]), label.links):
                link = net.links[lid]
                assert (link.from_node, link.to_node) == (u, w)

    def test_repeated_calls_identical(self, net_grid4):
        lt = lambda l: free_flow_time(l)
        a = single_source(net_grid4, "a", lt)
        b = single_source(net_grid4, "a", lt)
        assert a == b
