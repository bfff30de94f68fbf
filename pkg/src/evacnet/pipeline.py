"""End-to-end composition: exits -> routes -> pickups -> simulation.

Also houses the sweep harness that replays the whole pipeline across
vehicle counts and seeded repetitions, and the shared-ride versus own-car
comparison used to quantify the benefit of car sharing.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from statistics import fmean, pstdev
from typing import IO, NamedTuple, Sequence

from .assignment import (
    AssignmentConfig,
    PickupPlan,
    ScheduledStop,
    SeekerState,
    assign,
    dwell_by_link_index,
    eligible_pairs,
    inject_stops,
)
from .exits import ExitPoint, compute_exits
from .geometry import Polygon
from .network import RoadNetwork
from .planner import CongestionEstimate, PlanResult, RouteAssignment, VolunteerState, plan_routes
from .scenario import Scenario, ScenarioSpec, generate
from .simulator import SimConfig, SimResult, VehiclePlan, run

SWEEP_CSV_HEADER = "vehicles,mean_evac_s,std_between_runs_s,mean_within_run_std_s,stranded"


def vehicle_from_assignment(
    ra: RouteAssignment,
    stops: Sequence[ScheduledStop] = (),
    departure: float = 0.0,
) -> VehiclePlan:
    """Turn a planned route (plus scheduled stops) into a simulator vehicle."""
    links = ra.route.links
    offset = 1.0
    if ra.route.terminal_link is not None:
        links = links + (ra.route.terminal_link,)
        offset = ra.route.terminal_offset
    return VehiclePlan(
        id=ra.volunteer_id,
        links=links,
        exit_offset=offset if links else 0.0,
        dwell_by_link=dwell_by_link_index(stops),
        departure=departure,
    )


@dataclass(frozen=True)
class PipelineResult:
    exits: tuple[ExitPoint, ...]
    plan: PlanResult
    pickups: PickupPlan
    scheduled: dict[str, tuple[ScheduledStop, ...]]
    vehicles: tuple[VehiclePlan, ...]
    sim: SimResult


def run_pipeline(
    net: RoadNetwork,
    zone: Polygon,
    volunteers: Sequence[VolunteerState],
    seekers: Sequence[SeekerState] = (),
    *,
    congestion: CongestionEstimate | None = None,
    assign_cfg: AssignmentConfig | None = None,
    sim_cfg: SimConfig | None = None,
    check_invariants: bool = False,
) -> PipelineResult:
    """Plan and simulate one evacuation from scratch."""
    sim_cfg = sim_cfg or SimConfig()
    exits = compute_exits(net, zone)
    plan = plan_routes(net, exits, volunteers, congestion, zone)
    pairs = eligible_pairs(plan.assignments, seekers, assign_cfg)
    pickups = assign(pairs, volunteers, seekers)
    scheduled: dict[str, tuple[ScheduledStop, ...]] = {}
    by_volunteer = {ra.volunteer_id: ra for ra in plan.assignments}
    for vid, stops in pickups.stops.items():
        scheduled[vid] = inject_stops(net, by_volunteer[vid], stops, sim_cfg.dwell)
    vehicles = tuple(
        vehicle_from_assignment(ra, scheduled.get(ra.volunteer_id, ()))
        for ra in plan.assignments
    )
    sim = run(
        net,
        vehicles,
        sim_cfg,
        unserved_seekers=len(pickups.unserved),
        check_invariants=check_invariants,
    )
    return PipelineResult(tuple(exits), plan, pickups, scheduled, vehicles, sim)


def run_own_car_baseline(
    net: RoadNetwork,
    zone: Polygon,
    volunteers: Sequence[VolunteerState],
    seekers: Sequence[SeekerState],
    *,
    sim_cfg: SimConfig | None = None,
    check_invariants: bool = False,
) -> SimResult:
    """Counterfactual where every seeker drives an own vehicle: volunteers
    plus one car per seeker, no pickups."""
    sim_cfg = sim_cfg or SimConfig()
    exits = compute_exits(net, zone)
    drivers = list(volunteers) + [
        VolunteerState(f"own-{s.id}", s.location, 0) for s in seekers
    ]
    plan = plan_routes(net, exits, drivers, None, zone)
    vehicles = tuple(vehicle_from_assignment(ra) for ra in plan.assignments)
    return run(net, vehicles, sim_cfg, check_invariants=check_invariants)


class SweepRow(NamedTuple):
    vehicles: int
    mean_evac_s: float
    std_between_runs_s: float
    mean_within_run_std_s: float
    stranded: int


def child_seed(seed: int, count: int, rep: int) -> int:
    """Stable 64-bit derivation of per-repetition seeds."""
    mix = seed ^ (count * 0x9E3779B97F4A7C15) ^ (rep * 0xBF58476D1CE4E5B9)
    return mix & 0xFFFFFFFFFFFFFFFF


def sweep(
    spec: ScenarioSpec,
    vehicle_counts: Sequence[int],
    repetitions: int,
    sim_cfg: SimConfig | None = None,
) -> list[SweepRow]:
    """Plan + assign + simulate `repetitions` seeded scenarios per count."""
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    rows: list[SweepRow] = []
    for count in vehicle_counts:
        means: list[float] = []
        stds: list[float] = []
        stranded = 0
        for rep in range(repetitions):
            scenario = generate(replace(spec, volunteers=count, seed=child_seed(spec.seed, count, rep)))
            result = run_pipeline(
                scenario.network,
                scenario.zone,
                scenario.volunteers,
                scenario.seekers,
                sim_cfg=sim_cfg,
            ).sim
            means.append(result.mean_evac)
            stds.append(result.std_evac)
            stranded += len(result.stranded)
        rows.append(SweepRow(
            vehicles=count,
            mean_evac_s=fmean(means),
            std_between_runs_s=pstdev(means) if len(means) > 1 else 0.0,
            mean_within_run_std_s=fmean(stds),
            stranded=stranded,
        ))
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER.split(","))
    for row in rows:
        writer.writerow([
            row.vehicles,
            f"{row.mean_evac_s:.6f}",
            f"{row.std_between_runs_s:.6f}",
            f"{row.mean_within_run_std_s:.6f}",
            row.stranded,
        ])


def scenario_pipeline(spec: ScenarioSpec, *, sim_cfg: SimConfig | None = None,
                      check_invariants: bool = False) -> tuple[Scenario, PipelineResult]:
    """Generate a scenario and push it through the full pipeline."""
    scenario = generate(spec)
    result = run_pipeline(
        scenario.network,
        scenario.zone,
        scenario.volunteers,
        scenario.seekers,
        sim_cfg=sim_cfg,
        check_invariants=check_invariants,
    )
    return scenario, result
