"""Directed road graph: loading, validation, and travel-time search.

The travel-time metric is injected into the search as a function of the
link, so callers can route on free-flow times or congestion-adjusted ones
without touching the graph.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from typing import IO, Callable, Iterable, NamedTuple

from .errors import DuplicateIdError, UnknownIdError, ValidationError
from .geometry import Point2D

#: Links may not be shorter than the straight line between their endpoints,
#: with a small slack for rounded survey data.
LENGTH_SLACK = 0.999


@dataclass(frozen=True)
class Node:
    id: str
    location: Point2D


@dataclass(frozen=True)
class Link:
    id: str
    from_node: str
    to_node: str
    length: float        # meters
    free_speed: float    # meters/second
    lanes: int
    flow_capacity: float  # vehicles/hour


@dataclass(frozen=True)
class Route:
    """A walk through the network: visited nodes, the links between them,
    and an optional terminal link travelled up to a fractional offset."""

    nodes: tuple[str, ...]
    links: tuple[str, ...]
    terminal_link: str | None
    terminal_offset: float

    def __post_init__(self) -> None:
        if len(self.links) != len(self.nodes) - 1:
            raise ValidationError("route link count must be node count - 1")
        if not 0.0 <= self.terminal_offset <= 1.0:
            raise ValidationError(f"terminal offset {self.terminal_offset} outside [0, 1]")

    @property
    def is_empty(self) -> bool:
        return not self.links and (self.terminal_link is None or self.terminal_offset == 0.0)


class PathLabel(NamedTuple):
    time: float
    nodes: tuple[str, ...]
    links: tuple[str, ...]


class RoadNetwork:
    """Immutable directed road graph with an outgoing-link index."""

    __slots__ = ("nodes", "links", "_out")

    def __init__(self, nodes: Iterable[Node], links: Iterable[Link]) -> None:
        node_map: dict[str, Node] = {}
        for n in nodes:
            if n.id in node_map:
                raise DuplicateIdError(f"duplicate node id '{n.id}'")
            node_map[n.id] = n
        out: dict[str, list[Link]] = {nid: [] for nid in node_map}
        link_map: dict[str, Link] = {}
        for link in links:
            if link.id in link_map:
                raise DuplicateIdError(f"duplicate link id '{link.id}'")
            _validate_link(link, node_map)
            link_map[link.id] = link
            out[link.from_node].append(link)
        for lst in out.values():
            lst.sort(key=lambda l: l.id)
        self.nodes = node_map
        self.links = link_map
        self._out = {nid: tuple(lst) for nid, lst in out.items()}

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownIdError(f"unknown node '{node_id}'") from None

    def link(self, link_id: str) -> Link:
        try:
            return self.links[link_id]
        except KeyError:
            raise UnknownIdError(f"unknown link '{link_id}'") from None

    def out_links(self, node_id: str) -> tuple[Link, ...]:
        try:
            return self._out[node_id]
        except KeyError:
            raise UnknownIdError(f"unknown node '{node_id}'") from None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RoadNetwork) and self.nodes == other.nodes and self.links == other.links

    def __repr__(self) -> str:
        return f"RoadNetwork(|V|={len(self.nodes)}, |E|={len(self.links)})"


def _validate_link(link: Link, nodes: dict[str, Node]) -> None:
    for endpoint in (link.from_node, link.to_node):
        if endpoint not in nodes:
            raise ValidationError(f"link '{link.id}' references missing node '{endpoint}'")
    if link.from_node == link.to_node:
        raise ValidationError(f"link '{link.id}' is a self-loop")
    if not (link.length > 0.0 and math.isfinite(link.length)):
        raise ValidationError(f"link '{link.id}' has nonpositive length {link.length}")
    if not (link.free_speed > 0.0 and math.isfinite(link.free_speed)):
        raise ValidationError(f"link '{link.id}' has nonpositive free speed {link.free_speed}")
    if not (isinstance(link.lanes, int) and link.lanes >= 1):
        raise ValidationError(f"link '{link.id}' needs a positive integer lane count, got {link.lanes!r}")
    if not (link.flow_capacity > 0.0 and math.isfinite(link.flow_capacity)):
        raise ValidationError(f"link '{link.id}' has nonpositive flow capacity {link.flow_capacity}")
    euclid = nodes[link.from_node].location.distance_to(nodes[link.to_node].location)
    if link.length < euclid * LENGTH_SLACK:
        raise ValidationError(
            f"link '{link.id}' length {link.length} is shorter than the straight line {euclid:.3f}"
        )


def _req(obj: dict, key: str, cast, ctx: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"{ctx}: missing field '{key}'")
    try:
        return cast(obj[key])
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{ctx}: bad field '{key}': {exc}") from None


def load_network(source: bytes | str | IO) -> RoadNetwork:
    """Load the canonical JSON network format.

    Fails atomically: any invariant violation raises before a network is
    returned. Malformed JSON raises json.JSONDecodeError.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    data = json.loads(source)
    if not isinstance(data, dict) or "nodes" not in data or "links" not in data:
        raise ValidationError("network document must be an object with 'nodes' and 'links'")
    nodes = [
        Node(_req(n, "id", str, "node"), Point2D(_req(n, "x", float, "node"), _req(n, "y", float, "node")))
        for n in data["nodes"]
    ]
    links = [
        Link(
            id=_req(l, "id", str, "link"),
            from_node=_req(l, "from", str, "link"),
            to_node=_req(l, "to", str, "link"),
            length=_req(l, "length", float, "link"),
            free_speed=_req(l, "free_speed", float, "link"),
            lanes=_req(l, "lanes", int, "link"),
            flow_capacity=_req(l, "flow_capacity", float, "link"),
        )
        for l in data["links"]
    ]
    return RoadNetwork(nodes, links)


def network_to_json(net: RoadNetwork) -> dict:
    """Canonical JSON form (nodes and links sorted by id)."""
    return {
        "nodes": [
            {"id": n.id, "x": n.location.x, "y": n.location.y}
            for n in sorted(net.nodes.values(), key=lambda n: n.id)
        ],
        "links": [
            {
                "id": l.id,
                "from": l.from_node,
                "to": l.to_node,
                "length": l.length,
                "free_speed": l.free_speed,
                "lanes": l.lanes,
                "flow_capacity": l.flow_capacity,
            }
            for l in sorted(net.links.values(), key=lambda l: l.id)
        ],
    }


def free_flow_time(link: Link) -> float:
    """Unimpeded traversal time of a link in seconds."""
    return link.length / link.free_speed


def single_source(
    net: RoadNetwork, origin: str, link_time: Callable[[Link], float]
) -> dict[str, PathLabel]:
    """Minimum-travel-time labels from origin to every reachable node.

    Among equal-time paths the lexicographically smallest node-id sequence
    wins (then the smallest link-id sequence), which makes results
    deterministic on symmetric networks.
    """
    if origin not in net.nodes:
        raise UnknownIdError(f"unknown origin node '{origin}'")
    best: dict[str, tuple[float, tuple[str, ...], tuple[str, ...]]] = {
        origin: (0.0, (origin,), ())
    }
    heap: list[tuple[float, tuple[str, ...], tuple[str, ...]]] = [(0.0, (origin,), ())]
    settled: set[str] = set()
    while heap:
        time, nodes, links = heapq.heappop(heap)
        u = nodes[-1]
        if u in settled:
            continue
        settled.add(u)
        for link in net.out_links(u):
            v = link.to_node
            if v in settled:
                continue
            w = link_time(link)
            if not (w > 0.0 and math.isfinite(w)):
                raise ValidationError(f"link_time must be positive and finite, got {w!r} for '{link.id}'")
            cand = (time + w, nodes + (v,), links + (link.id,))
            cur = best.get(v)
            if cur is None or cand < cur:
                best[v] = cand
                heapq.heappush(heap, cand)
    return {u: PathLabel(*best[u]) for u in settled}


def shortest_path(
    net: RoadNetwork,
    origin: str,
    targets: Iterable[tuple[str, float]],
    link_time: Callable[[Link], float],
) -> dict[tuple[str, float], tuple[Route, float]]:
    """Minimum-time routes from origin to each (link id, offset) target.

    A target on link L at offset f costs the time to L's from-node plus
    f x link_time(L). Unreachable targets are omitted from the result.
    """
    targets = list(targets)
    for link_id, offset in targets:
        if link_id not in net.links:
            raise UnknownIdError(f"unknown target link '{link_id}'")
        if not 0.0 <= offset <= 1.0:
            raise ValidationError(f"target offset {offset} outside [0, 1]")
    labels = single_source(net, origin, link_time)
    result: dict[tuple[str, float], tuple[Route, float]] = {}
    for link_id, offset in targets:
        link = net.links[link_id]
        label = labels.get(link.from_node)
        if label is None:
            continue
        route = Route(
            nodes=label.nodes,
            links=label.links,
            terminal_link=link_id,
            terminal_offset=offset,
        )
        result[(link_id, offset)] = (route, label.time + offset * link_time(link))
    return result
