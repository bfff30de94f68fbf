"""Session state with append-only event-log persistence and a topic bus.

Every mutation appends one event per effect to the session's JSON-lines
log; replaying a log from empty reconstructs the exact live state,
including timestamps and the published plan. All mutations of one session
are serialized behind its lock (single writer per session); snapshots read
under the same lock and are therefore always internally consistent.

The bus mirrors a broker topic contract: ``session/{id}/plan`` retains the
last published plan, ``session/{id}/events`` streams every change. Bind a
real broker by implementing :class:`PubSub` and passing it to the store.
"""
from __future__ import annotations

import json
import queue
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .. import serialize
from ..assignment import AssignmentConfig, PickupPlan, SeekerState, assign, eligible_pairs
from ..errors import PreconditionError, UnknownIdError, ValidationError
from ..exits import ExitPoint, compute_exits
from ..geometry import Point2D, Polygon, polygon_from_json, polygon_to_json
from ..network import RoadNetwork, load_network, network_to_json
from ..planner import PlanResult, VolunteerState, plan_routes
from ..serialize import as_finite_number


class PubSub(ABC):
    """Minimal topic contract the service publishes through."""

    @abstractmethod
    def publish(self, topic: str, payload: dict, retain: bool = False) -> None: ...

    @abstractmethod
    def subscribe(self, topic: str) -> "Subscription": ...

    @abstractmethod
    def retained(self, topic: str) -> dict | None: ...


class Subscription:
    def __init__(self, bus: "InProcessBus", topic: str) -> None:
        self._bus = bus
        self.topic = topic
        self.messages: "queue.Queue[dict]" = queue.Queue()

    def get(self, timeout: float | None = None) -> dict:
        return self.messages.get(timeout=timeout)

    def close(self) -> None:
        self._bus._drop(self)


class InProcessBus(PubSub):
    """Thread-safe in-process topic bus with per-topic retained messages."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._subscribers: dict[str, list[Subscription]] = {}
        self._retained: dict[str, dict] = {}

    def publish(self, topic: str, payload: dict, retain: bool = False) -> None:
        with self._lock:
            if retain:
                self._retained[topic] = payload
            subs = list(self._subscribers.get(topic, ()))
        for sub in subs:
            sub.messages.put(payload)

    def subscribe(self, topic: str) -> Subscription:
        sub = Subscription(self, topic)
        with self._lock:
            self._subscribers.setdefault(topic, []).append(sub)
        return sub

    def retained(self, topic: str) -> dict | None:
        with self._lock:
            return self._retained.get(topic)

    def _drop(self, sub: Subscription) -> None:
        with self._lock:
            subs = self._subscribers.get(sub.topic)
            if subs and sub in subs:
                subs.remove(sub)


@dataclass
class _Session:
    id: str
    network: RoadNetwork
    pickup_distance: float
    zone: Polygon | None = None
    exits: list[ExitPoint] = field(default_factory=list)
    volunteers: dict[str, VolunteerState] = field(default_factory=dict)
    seekers: dict[str, SeekerState] = field(default_factory=dict)
    updated_at: dict[str, float] = field(default_factory=dict)
    plan: PlanResult | None = None
    pickups: PickupPlan | None = None
    plan_version: int = 0
    seq: int = 0
    next_volunteer: int = 1
    next_seeker: int = 1
    lock: threading.RLock = field(default_factory=threading.RLock)


class SessionStore:
    """All live sessions, their event logs, and the bus they publish on."""

    def __init__(
        self,
        data_dir: Path | str | None = None,
        bus: PubSub | None = None,
        time_fn: Callable[[], float] = time.time,
    ) -> None:
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.bus = bus or InProcessBus()
        self._time = time_fn
        self._lock = threading.Lock()
        self._sessions: dict[str, _Session] = {}
        self._next_session = 1
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            for log in sorted(self.data_dir.glob("*.events.jsonl")):
                self._replay_file(log)

    # -- event plumbing -----------------------------------------------------

    def _log_path(self, sid: str) -> Path | None:
        if self.data_dir is None:
            return None
        return self.data_dir / f"{sid}.events.jsonl"

    def _append(self, session: _Session, kind: str, payload: dict, ts: float | None = None) -> dict:
        session.seq += 1
        record = {
            "seq": session.seq,
            "ts": self._time() if ts is None else ts,
            "kind": kind,
            "payload": payload,
        }
        path = self._log_path(session.id)
        if path is not None:
            with path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
                fh.flush()
        self.bus.publish(f"session/{session.id}/events", record)
        return record

    def _replay_file(self, path: Path) -> None:
        sid = path.name[: -len(".events.jsonl")]
        with path.open("r", encoding="utf-8") as fh:
            records = [json.loads(line) for line in fh if line.strip()]
        if not records:
            return
        self.replay(sid, records)

    def replay(self, sid: str, records: Iterable[dict]) -> None:
        """Rebuild a session from its event records (no re-logging)."""
        session: _Session | None = None
        for record in records:
            kind = record["kind"]
            payload = record["payload"]
            ts = record["ts"]
            if kind == "session-created":
                net = load_network(json.dumps(payload["network"]))
                session = _Session(
                    id=sid,
                    network=net,
                    pickup_distance=payload.get("max_pickup_distance", 200.0),
                )
            elif session is None:
                raise ValidationError(f"event log for '{sid}' does not start with session-created")
            elif kind == "register":
                client = payload["client"]
                if payload["role"] == "volunteer":
                    vol = serialize.volunteers_from_json([client])[0]
                    session.volunteers[vol.id] = vol
                    num = int(vol.id[1:]) if vol.id[1:].isdigit() else 0
                    session.next_volunteer = max(session.next_volunteer, num + 1)
                    session.updated_at[vol.id] = ts
                else:
                    seeker = serialize.seekers_from_json([client])[0]
                    session.seekers[seeker.id] = seeker
                    num = int(seeker.id[1:]) if seeker.id[1:].isdigit() else 0
                    session.next_seeker = max(session.next_seeker, num + 1)
                    session.updated_at[seeker.id] = ts
            elif kind == "update-location":
                cid = payload["id"]
                loc = Point2D(payload["x"], payload["y"])
                if cid in session.volunteers:
                    old = session.volunteers[cid]
                    session.volunteers[cid] = VolunteerState(cid, loc, old.seats)
                elif cid in session.seekers:
                    old = session.seekers[cid]
                    session.seekers[cid] = SeekerState(cid, loc, old.party_size)
                session.updated_at[cid] = ts
            elif kind == "set-zone":
                session.zone = polygon_from_json(payload["zone"])
                session.exits = serialize.exits_from_json(payload["exits"])
            elif kind == "replan":
                pass  # effect is recorded by the paired plan-published event
            elif kind == "plan-published":
                session.plan = serialize.plan_from_json(payload["plan"])
                session.pickups = serialize.pickups_from_json(payload["pickups"])
                session.plan_version = payload["version"]
                self.bus.publish(
                    f"session/{sid}/plan",
                    {"kind": "plan-published", "payload": payload},
                    retain=True,
                )
            session.seq = record["seq"]
        if session is not None:
            with self._lock:
                self._sessions[sid] = session
                if sid.startswith("sess") and sid[4:].isdigit():
                    self._next_session = max(self._next_session, int(sid[4:]) + 1)

    # -- session operations ---------------------------------------------------

    def _session(self, sid: str) -> _Session:
        with self._lock:
            try:
                return self._sessions[sid]
            except KeyError:
                raise UnknownIdError(f"unknown session '{sid}'") from None

    def session_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._sessions)

    def create_session(self, network_json: dict, max_pickup_distance: float = 200.0) -> str:
        if not isinstance(network_json, dict):
            raise ValidationError("session payload must include a 'network' object")
        net = load_network(json.dumps(network_json))
        AssignmentConfig(max_pickup_distance)  # validates the bound
        with self._lock:
            sid = f"sess{self._next_session}"
            self._next_session += 1
            session = _Session(id=sid, network=net, pickup_distance=max_pickup_distance)
            self._sessions[sid] = session
        self._append(session, "session-created", {
            "network": network_to_json(net),
            "max_pickup_distance": max_pickup_distance,
        })
        return sid

    def register(self, sid: str, role: str, payload: dict) -> str:
        if role not in ("volunteer", "seeker"):
            raise ValidationError(f"role must be 'volunteer' or 'seeker', got {role!r}")
        session = self._session(sid)
        with session.lock:
            loc = Point2D(as_finite_number(payload.get("x"), f"{role}.x"), as_finite_number(payload.get("y"), f"{role}.y"))
            if role == "volunteer":
                seats = payload.get("seats")
                if not isinstance(seats, int) or isinstance(seats, bool):
                    raise ValidationError("volunteer.seats must be an integer")
                cid = f"v{session.next_volunteer}"
                client = VolunteerState(cid, loc, seats)
                session.next_volunteer += 1
                session.volunteers[cid] = client
                client_json = serialize.volunteers_to_json([client])[0]
            else:
                party = payload.get("party_size", 1)
                if not isinstance(party, int) or isinstance(party, bool):
                    raise ValidationError("seeker.party_size must be an integer")
                cid = f"s{session.next_seeker}"
                client = SeekerState(cid, loc, party)
                session.next_seeker += 1
                session.seekers[cid] = client
                client_json = serialize.seekers_to_json([client])[0]
            record = self._append(session, "register", {"role": role, "client": client_json})
            session.updated_at[cid] = record["ts"]
            return cid

    def update_location(self, sid: str, cid: str, x: object, y: object) -> None:
        session = self._session(sid)
        with session.lock:
            loc = Point2D(as_finite_number(x, "location.x"), as_finite_number(y, "location.y"))
            if cid in session.volunteers:
                old = session.volunteers[cid]
                session.volunteers[cid] = VolunteerState(cid, loc, old.seats)
                role = "volunteer"
            elif cid in session.seekers:
                old_s = session.seekers[cid]
                session.seekers[cid] = SeekerState(cid, loc, old_s.party_size)
                role = "seeker"
            else:
                raise UnknownIdError(f"unknown client '{cid}'")
            record = self._append(session, "update-location", {"id": cid, "x": loc.x, "y": loc.y, "role": role})
            session.updated_at[cid] = record["ts"]

    def set_zone(self, sid: str, zone_json: object) -> list[ExitPoint]:
        session = self._session(sid)
        with session.lock:
            zone = polygon_from_json(zone_json)
            exits = compute_exits(session.network, zone)
            session.zone = zone
            session.exits = exits
            self._append(session, "set-zone", {
                "zone": polygon_to_json(zone),
                "exits": serialize.exits_to_json(exits),
            })
            return exits

    def replan(self, sid: str) -> int:
        session = self._session(sid)
        with session.lock:
            if session.zone is None:
                raise PreconditionError("no zone set for session")
            if not session.volunteers:
                raise PreconditionError("no volunteers registered")
            volunteers = [session.volunteers[k] for k in sorted(session.volunteers)]
            seekers = [session.seekers[k] for k in sorted(session.seekers)]
            plan = plan_routes(session.network, session.exits, volunteers, None, session.zone)
            pairs = eligible_pairs(plan.assignments, seekers, AssignmentConfig(session.pickup_distance))
            pickups = assign(pairs, volunteers, seekers)
            session.plan = plan
            session.pickups = pickups
            session.plan_version += 1
            self._append(session, "replan", {"version": session.plan_version})
            payload = {
                "version": session.plan_version,
                "plan": serialize.plan_to_json(plan),
                "pickups": serialize.pickups_to_json(pickups),
            }
            self._append(session, "plan-published", payload)
            self.bus.publish(f"session/{sid}/plan", {"kind": "plan-published", "payload": payload}, retain=True)
            return session.plan_version

    def plan_json(self, sid: str) -> dict:
        session = self._session(sid)
        with session.lock:
            if session.plan is None:
                return {"version": 0, "plan": None, "pickups": None}
            return {
                "version": session.plan_version,
                "plan": serialize.plan_to_json(session.plan),
                "pickups": serialize.pickups_to_json(session.pickups),
            }

    def snapshot(self, sid: str) -> dict:
        """Consistent point-in-time view of the whole session."""
        session = self._session(sid)
        with session.lock:
            return {
                "session": session.id,
                "event_seq": session.seq,
                "network": network_to_json(session.network),
                "zone": polygon_to_json(session.zone) if session.zone is not None else None,
                "exits": serialize.exits_to_json(session.exits),
                "volunteers": [
                    {**serialize.volunteers_to_json([session.volunteers[k]])[0],
                     "last_update": session.updated_at.get(k)}
                    for k in sorted(session.volunteers)
                ],
                "seekers": [
                    {**serialize.seekers_to_json([session.seekers[k]])[0],
                     "last_update": session.updated_at.get(k)}
                    for k in sorted(session.seekers)
                ],
                "plan_version": session.plan_version,
                "plan": serialize.plan_to_json(session.plan) if session.plan is not None else None,
                "pickups": serialize.pickups_to_json(session.pickups) if session.pickups is not None else None,
                "max_pickup_distance": session.pickup_distance,
            }
