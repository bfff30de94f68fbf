"""HTTP layer: JSON endpoints plus a server-sent event stream per session."""
from __future__ import annotations

import json
import queue
from pathlib import Path
from typing import Iterator

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..errors import PreconditionError, UnknownIdError, ValidationError
from .. import serialize
from .store import SessionStore

# Short poll so a closing stream reaches its next yield (and GeneratorExit)
# quickly; an actual keep-alive comment goes out about every 15 s.
_POLL_SECONDS = 0.25
_POLLS_PER_HEARTBEAT = 60


def create_app(store: SessionStore, console_dir: Path | str | None = None) -> FastAPI:
    app = FastAPI(title="evacnet coordination service")

    @app.exception_handler(UnknownIdError)
    async def _unknown(request: Request, exc: UnknownIdError) -> JSONResponse:
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ValidationError)
    async def _invalid(request: Request, exc: ValidationError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(PreconditionError)
    async def _precondition(request: Request, exc: PreconditionError) -> JSONResponse:
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.post("/sessions")
    def create_session(payload: dict = Body(...)) -> dict:
        if "network" not in payload:
            raise ValidationError("session payload must include 'network'")
        sid = store.create_session(payload["network"], payload.get("max_pickup_distance", 200.0))
        return {"id": sid}

    @app.get("/sessions")
    def list_sessions() -> dict:
        return {"sessions": store.session_ids()}

    @app.post("/sessions/{sid}/volunteers")
    def register_volunteer(sid: str, payload: dict = Body(...)) -> dict:
        return {"id": store.register(sid, "volunteer", payload)}

    @app.post("/sessions/{sid}/seekers")
    def register_seeker(sid: str, payload: dict = Body(...)) -> dict:
        return {"id": store.register(sid, "seeker", payload)}

    @app.put("/sessions/{sid}/clients/{cid}/location")
    def update_location(sid: str, cid: str, payload: dict = Body(...)) -> dict:
        store.update_location(sid, cid, payload.get("x"), payload.get("y"))
        return {"ok": True}

    @app.put("/sessions/{sid}/zone")
    def set_zone(sid: str, vertices: list = Body(...)) -> dict:
        exits = store.set_zone(sid, vertices)
        return {"exits": serialize.exits_to_json(exits)}

    @app.post("/sessions/{sid}/replan")
    def replan(sid: str) -> dict:
        version = store.replan(sid)
        plan = store.plan_json(sid)
        return {
            "version": version,
            "assigned": len(plan["pickups"]["assignments"]),
            "unserved": len(plan["pickups"]["unserved"]),
        }

    @app.get("/sessions/{sid}/snapshot")
    def snapshot(sid: str) -> dict:
        return store.snapshot(sid)

    @app.get("/sessions/{sid}/plan")
    def plan(sid: str) -> dict:
        return store.plan_json(sid)

    @app.get("/sessions/{sid}/stream")
    def stream(sid: str) -> StreamingResponse:
        store.snapshot(sid)  # 404 on unknown session before streaming starts

        def gen() -> Iterator[str]:
            events = store.bus.subscribe(f"session/{sid}/events")
            try:
                retained = store.bus.retained(f"session/{sid}/plan")
                if retained is not None:
                    yield _sse(retained["kind"], retained["payload"])
                idle = 0
                while True:
                    try:
                        record = events.get(timeout=_POLL_SECONDS)
                    except queue.Empty:
                        idle += 1
                        if idle >= _POLLS_PER_HEARTBEAT:
                            idle = 0
                            yield ": keep-alive\n\n"
                        else:
                            yield ""
                        continue
                    idle = 0
                    kind = record["kind"]
                    if kind == "register" or kind == "update-location":
                        yield _sse("client-updated", record["payload"])
                    elif kind == "set-zone":
                        yield _sse("zone-set", record["payload"])
                    elif kind == "plan-published":
                        yield _sse("plan-published", record["payload"])
            finally:
                events.close()

        return StreamingResponse(gen(), media_type="text/event-stream")

    if console_dir is not None:
        app.mount("/", StaticFiles(directory=str(console_dir), html=True), name="console")
    return app


def _sse(event: str, payload: dict) -> str:
    return f"event: {event}\ndata: {json.dumps(payload, sort_keys=True)}\n\n"
