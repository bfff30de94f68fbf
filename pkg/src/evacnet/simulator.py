"""Deterministic discrete-time link-queue traffic simulation.

Each vehicle traverses a link in free-flow time plus any pickup dwell,
then waits in the link's FIFO discharge queue. Per step, a link releases
queued vehicles at its flow-capacity rate and only while the downstream
link has storage room; a link's storage is floor(length * lanes /
vehicle_length) vehicles, never below one. A vehicle leaves the network
the moment it covers its exit offset on the terminal link; it never joins
that link's discharge queue.

No overtaking happens within a link: traversal completions graduate from
the front of the running column only, and the discharge queue is strictly
first-in-first-out. Determinism is structural, not seeded: links discharge
in ascending id order, staged vehicles enter in (departure, id) order, and
a run consumes no randomness.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from statistics import fmean, pstdev
from typing import Mapping, Sequence

from .errors import InvariantViolation, UnknownIdError, ValidationError
from .network import Link, RoadNetwork, free_flow_time
from .planner import CongestionEstimate

_TIME_EPS = 1e-9


@dataclass(frozen=True)
class SimConfig:
    time_step: float = 1.0        # seconds
    horizon: float = 14400.0      # seconds
    vehicle_length: float = 7.5   # meters, for storage capacity
    dwell: float = 30.0           # seconds per pickup stop
    seed: int = 0                 # consumed by scenario generation, not by run()

    def __post_init__(self) -> None:
        if not self.time_step > 0.0:
            raise ValidationError(f"time_step must be > 0, got {self.time_step}")
        if self.horizon < self.time_step:
            raise ValidationError(f"horizon {self.horizon} must be >= time_step {self.time_step}")
        if not self.vehicle_length > 0.0:
            raise ValidationError(f"vehicle_length must be > 0, got {self.vehicle_length}")


@dataclass(frozen=True)
class VehiclePlan:
    """A vehicle's itinerary: full link sequence (terminal included), the
    exit offset on the final link, and extra dwell seconds per link index.
    An empty link sequence means the vehicle is already at its exit."""

    id: str
    links: tuple[str, ...]
    exit_offset: float = 1.0
    dwell_by_link: Mapping[int, float] = field(default_factory=dict)
    departure: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.exit_offset <= 1.0:
            raise ValidationError(f"vehicle '{self.id}': exit offset {self.exit_offset} outside [0, 1]")
        if self.departure < 0.0:
            raise ValidationError(f"vehicle '{self.id}': departure must be >= 0, got {self.departure}")
        for idx, extra in self.dwell_by_link.items():
            if not (0 <= idx < max(len(self.links), 1)) or extra < 0.0:
                raise ValidationError(f"vehicle '{self.id}': bad dwell entry {idx}: {extra}")


@dataclass(frozen=True)
class SimResult:
    evac_times: Mapping[str, float]     # exited vehicles only
    stranded: tuple[str, ...]           # still en route at the horizon
    mean_evac: float                    # nan when nothing exited
    std_evac: float                     # population std over exited vehicles
    unserved_seekers: int
    congestion: CongestionEstimate      # per-link mean speed multiplier
    traversals: Mapping[str, tuple[int, float]]  # link id -> (count, total seconds)


class _VehicleRun:
    __slots__ = ("plan", "idx", "entered_at", "finish", "entry_seq")

    def __init__(self, plan: VehiclePlan) -> None:
        self.plan = plan
        self.idx = -1
        self.entered_at = 0.0
        self.finish = 0.0
        self.entry_seq = -1


class _LinkRun:
    __slots__ = ("link", "fft", "storage", "cap", "burst", "tokens", "last_refill",
                 "running", "queue", "next_seq", "last_grad_seq", "last_out_seq")

    def __init__(self, link: Link, cfg: SimConfig) -> None:
        self.link = link
        self.fft = free_flow_time(link)
        self.storage = max(1, int(link.length * link.lanes / cfg.vehicle_length))
        self.cap = link.flow_capacity / 3600.0 * cfg.time_step
        self.burst = max(self.cap, 1.0)
        self.tokens = self.burst
        self.last_refill = 0
        self.running: deque[_VehicleRun] = deque()
        self.queue: deque[_VehicleRun] = deque()
        self.next_seq = 0
        # FIFO bookkeeping: traversal completions and downstream discharges
        # must each happen in entry order (no overtaking within the link)
        self.last_grad_seq = -1
        self.last_out_seq = -1

    @property
    def occupancy(self) -> int:
        return len(self.running) + len(self.queue)

    def refill(self, step: int) -> None:
        if step > self.last_refill:
            self.tokens = min(self.tokens + self.cap * (step - self.last_refill), self.burst)
            self.last_refill = step


def run(
    net: RoadNetwork,
    vehicles: Sequence[VehiclePlan],
    cfg: SimConfig | None = None,
    *,
    unserved_seekers: int = 0,
    check_invariants: bool = False,
) -> SimResult:
    """Simulate all vehicles and report per-vehicle evacuation times.

    Evacuation time is the step at which the vehicle crosses its exit
    offset, minus its departure time. Vehicles still en route when the
    horizon ends are reported as stranded and excluded from the mean/std.
    """
    cfg = cfg or SimConfig()
    seen: set[str] = set()
    for plan in vehicles:
        if plan.id in seen:
            raise ValidationError(f"duplicate vehicle id '{plan.id}'")
        seen.add(plan.id)
        for lid in plan.links:
            if lid not in net.links:
                raise UnknownIdError(f"vehicle '{plan.id}' route references unknown link '{lid}'")

    dt = cfg.time_step
    nsteps = int(cfg.horizon // dt)
    states: dict[str, _LinkRun] = {}

    def lstate(lid: str) -> _LinkRun:
        st = states.get(lid)
        if st is None:
            st = _LinkRun(net.links[lid], cfg)
            states[lid] = st
        return st

    evac: dict[str, float] = {}
    traversal_count: dict[str, int] = {}
    traversal_total: dict[str, float] = {}
    active: set[str] = set()

    def log_traversal(lid: str, elapsed: float) -> None:
        traversal_count[lid] = traversal_count.get(lid, 0) + 1
        traversal_total[lid] = traversal_total.get(lid, 0.0) + elapsed

    def enter(vr: _VehicleRun, idx: int, now: float) -> None:
        lid = vr.plan.links[idx]
        st = lstate(lid)
        vr.idx = idx
        vr.entered_at = now
        vr.entry_seq = st.next_seq
        st.next_seq += 1
        last = idx == len(vr.plan.links) - 1
        traverse = st.fft * (vr.plan.exit_offset if last else 1.0)
        traverse += vr.plan.dwell_by_link.get(idx, 0.0)
        vr.finish = now + traverse
        st.running.append(vr)
        active.add(lid)

    staged: dict[str, deque[_VehicleRun]] = {}
    instant: deque[_VehicleRun] = deque()
    order = sorted(vehicles, key=lambda p: (p.departure, p.id))
    for plan in order:
        vr = _VehicleRun(plan)
        if plan.links:
            staged.setdefault(plan.links[0], deque()).append(vr)
        else:
            instant.append(vr)

    total = len(vehicles)
    remaining = total

    def check(now: float) -> None:
        staged_count = sum(len(q) for q in staged.values()) + len(instant)
        on_net = 0
        for lid, st in states.items():
            occ = st.occupancy
            on_net += occ
            if occ > st.storage:
                raise InvariantViolation(f"t={now}: link '{lid}' occupancy {occ} exceeds storage {st.storage}")
            if not (-_TIME_EPS <= st.tokens <= st.burst + _TIME_EPS):
                raise InvariantViolation(f"t={now}: link '{lid}' token accumulator {st.tokens} out of range")
        if staged_count + on_net + len(evac) != total:
            raise InvariantViolation(
                f"t={now}: conservation broken: staged={staged_count} on_net={on_net} exited={len(evac)} total={total}"
            )

    def graduate(st: _LinkRun, vr: _VehicleRun, lid: str, now: float) -> None:
        if vr.entry_seq <= st.last_grad_seq:
            raise InvariantViolation(f"t={now}: link '{lid}' traversals completed out of entry order")
        st.last_grad_seq = vr.entry_seq

    def discharge_out(st: _LinkRun, vr: _VehicleRun, lid: str, now: float) -> None:
        if vr.entry_seq <= st.last_out_seq:
            raise InvariantViolation(f"t={now}: link '{lid}' discharged vehicles out of entry order")
        st.last_out_seq = vr.entry_seq
        log_traversal(lid, now - vr.entered_at)

    for step in range(nsteps + 1):
        now = step * dt
        # vehicles with no links to drive exit where they stand
        while instant and instant[0].plan.departure <= now + _TIME_EPS:
            vr = instant.popleft()
            evac[vr.plan.id] = now - vr.plan.departure
            remaining -= 1
        # 1) traversal completions, front of the running column only
        for lid in sorted(active):
            st = states[lid]
            while st.running and st.running[0].finish <= now + _TIME_EPS:
                vr = st.running.popleft()
                graduate(st, vr, lid, now)
                if vr.idx == len(vr.plan.links) - 1:
                    # crossed the exit offset: leave the network mid-link
                    log_traversal(lid, now - vr.entered_at)
                    evac[vr.plan.id] = now - vr.plan.departure
                    remaining -= 1
                else:
                    st.queue.append(vr)
            if st.occupancy == 0:
                active.discard(lid)
        # 2) capacity-limited discharge, ascending link-id order
        for lid in sorted(active):
            st = states[lid]
            if not st.queue:
                continue
            st.refill(step)
            while st.queue and st.tokens >= 1.0 - _TIME_EPS:
                vr = st.queue[0]
                nxt = lstate(vr.plan.links[vr.idx + 1])
                if nxt.occupancy >= nxt.storage:
                    break  # head-of-line blocking: followers wait behind the head
                st.queue.popleft()
                st.tokens -= 1.0
                discharge_out(st, vr, lid, now)
                enter(vr, vr.idx + 1, now)
            if st.occupancy == 0:
                active.discard(lid)
        # 3) departures join their first link when there is room
        for lid in sorted(staged):
            q = staged[lid]
            st = lstate(lid)
            while q and q[0].plan.departure <= now + _TIME_EPS and st.occupancy < st.storage:
                enter(q.popleft(), 0, now)
            if not q:
                del staged[lid]
        if check_invariants:
            check(now)
        if remaining == 0:
            break

    stranded: list[str] = []
    for q in staged.values():
        stranded.extend(vr.plan.id for vr in q)
    stranded.extend(vr.plan.id for vr in instant)
    for st in states.values():
        stranded.extend(vr.plan.id for vr in st.running)
        stranded.extend(vr.plan.id for vr in st.queue)

    times = list(evac.values())
    mean = fmean(times) if times else math.nan
    std = pstdev(times) if times else math.nan
    multipliers: dict[str, float] = {}
    for lid in sorted(traversal_count):
        observed = traversal_total[lid] / traversal_count[lid]
        fft = free_flow_time(net.links[lid])
        if observed > 0.0:
            multipliers[lid] = min(1.0, fft / observed)
    return SimResult(
        evac_times=evac,
        stranded=tuple(sorted(stranded)),
        mean_evac=mean,
        std_evac=std,
        unserved_seekers=unserved_seekers,
        congestion=CongestionEstimate(multipliers),
        traversals={lid: (traversal_count[lid], traversal_total[lid]) for lid in sorted(traversal_count)},
    )


def congestion_feedback(result: SimResult) -> CongestionEstimate:
    """Per-link speed multipliers observed in a run: free-flow time over
    mean traversal time, clamped to (0, 1]. Untraversed links stay at 1."""
    return result.congestion


def free_flow_floor(net: RoadNetwork, plan: VehiclePlan) -> float:
    """Lower bound on the plan's evacuation time: free-flow traversal of
    every full link, the offset share of the terminal link, plus dwell."""
    if not plan.links:
        return 0.0
    acc = 0.0
    for i, lid in enumerate(plan.links):
        fft = free_flow_time(net.links[lid])
        acc += fft * (plan.exit_offset if i == len(plan.links) - 1 else 1.0)
    acc += sum(plan.dwell_by_link.values())
    return acc
