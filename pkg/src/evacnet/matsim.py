"""Converter for a minimal MATSim-style network XML subset.

Only node/link elements with the attributes below are understood; anything
else is ignored with a warning. Capacities are interpreted as vehicles per
hour.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .errors import ValidationError
from .geometry import Point2D
from .network import Link, Node, RoadNetwork

_NODE_ATTRS = {"id", "x", "y"}
_LINK_ATTRS = {"id", "from", "to", "length", "freespeed", "capacity", "permlanes"}


def parse_matsim_network(data: bytes | str) -> tuple[RoadNetwork, list[str]]:
    """Parse the XML and return the network plus human-readable warnings."""
    root = ET.fromstring(data)
    if root.tag != "network":
        raise ValidationError(f"expected a <network> document, got <{root.tag}>")
    warnings: list[str] = []
    flagged: set[str] = set()

    def note_unsupported(el: ET.Element, supported: set[str]) -> None:
        for attr in el.attrib:
            if attr not in supported and attr not in flagged:
                flagged.add(attr)
                warnings.append(f"ignoring unsupported attribute '{attr}' on <{el.tag}>")

    links_el = root.find("links")
    if links_el is not None:
        capperiod = links_el.get("capperiod")
        if capperiod is not None and capperiod != "01:00:00":
            warnings.append(f"capperiod '{capperiod}' not supported; capacities read as vehicles/hour")

    nodes = []
    for el in root.iter("node"):
        note_unsupported(el, _NODE_ATTRS)
        try:
            nodes.append(Node(el.attrib["id"], Point2D(float(el.attrib["x"]), float(el.attrib["y"]))))
        except KeyError as exc:
            raise ValidationError(f"<node> missing attribute {exc}") from None

    links = []
    for el in root.iter("link"):
        note_unsupported(el, _LINK_ATTRS)
        try:
            lanes_raw = float(el.attrib.get("permlanes", "1"))
            lanes = max(1, int(round(lanes_raw)))
            if abs(lanes_raw - lanes) > 1e-9:
                warnings.append(f"link '{el.attrib.get('id')}': fractional permlanes {lanes_raw} rounded to {lanes}")
            links.append(Link(
                id=el.attrib["id"],
                from_node=el.attrib["from"],
                to_node=el.attrib["to"],
                length=float(el.attrib["length"]),
                free_speed=float(el.attrib["freespeed"]),
                lanes=lanes,
                flow_capacity=float(el.attrib["capacity"]),
            ))
        except KeyError as exc:
            raise ValidationError(f"<link> missing attribute {exc}") from None
        except ValueError as exc:
            raise ValidationError(f"<link> has a malformed numeric attribute: {exc}") from None
    return RoadNetwork(nodes, links), warnings
