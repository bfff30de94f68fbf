"""Evacuation coordination toolkit.

Computes danger-zone exits from a road network, plans congestion-aware
volunteer routes, assigns car-less seekers to volunteers for on-route
pickup, simulates the evacuation with a capacity-constrained link-queue
model, and exposes the whole pipeline as a coordination service.
"""

from .assignment import (
    AssignmentConfig,
    EligiblePair,
    PickupPlan,
    PickupStop,
    ScheduledStop,
    SeekerState,
    assign,
    dwell_by_link_index,
    eligible_pairs,
    inject_stops,
)
from .errors import (
    DuplicateIdError,
    InvariantViolation,
    PreconditionError,
    UnknownIdError,
    ValidationError,
)
from .exits import ExitPoint, compute_exits
from .geometry import (
    EPSILON,
    Point2D,
    Polygon,
    Polyline,
    point_in_polygon,
    point_to_polyline,
    polygon_from_json,
    polygon_to_json,
    segment_polygon_crossings,
)
from .network import (
    Link,
    Node,
    PathLabel,
    RoadNetwork,
    Route,
    free_flow_time,
    load_network,
    network_to_json,
    shortest_path,
    single_source,
)
from .planner import (
    CongestionEstimate,
    PlanResult,
    RouteAssignment,
    VolunteerState,
    plan_routes,
    snap_to_network,
)
from .scenario import Scenario, ScenarioSpec, generate
from .simulator import (
    SimConfig,
    SimResult,
    VehiclePlan,
    congestion_feedback,
    free_flow_floor,
    run,
)

__version__ = "0.1.0"
