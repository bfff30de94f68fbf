"""Command-line entry point tying the pipeline stages together.

Exit codes: 0 success, 1 validation or precondition failure, 2 I/O or
parse failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

from . import pipeline, serialize
from .assignment import AssignmentConfig, assign, eligible_pairs, inject_stops
from .errors import PreconditionError, ValidationError
from .exits import compute_exits
from .geometry import polygon_from_json, polygon_to_json
from .matsim import parse_matsim_network
from .network import load_network, network_to_json
from .planner import plan_routes
from .scenario import ScenarioSpec, generate
from .simulator import SimConfig, run


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read_json(path: str):
    with open(path, "rb") as fh:
        return json.loads(fh.read().decode("utf-8"))


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_congestion(path: str | None):
    if path is None:
        return None
    return serialize.congestion_from_json(_read_json(path))


def _sim_config(path: str | None, seed: int | None) -> SimConfig:
    fields = {}
    if path is not None:
        data = _read_json(path)
        if not isinstance(data, dict):
            raise ValidationError("simulation config must be a JSON object")
        allowed = {f.name for f in dataclasses.fields(SimConfig)}
        unknown = set(data) - allowed
        if unknown:
            raise ValidationError(f"unknown simulation config keys: {sorted(unknown)}")
        fields.update(data)
    if seed is not None:
        fields["seed"] = seed
    return SimConfig(**fields)


def _scenario_spec(path: str, seed: int | None) -> ScenarioSpec:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ValidationError("scenario spec must be a JSON object")
    zone = data.pop("zone", None)
    allowed = {f.name for f in dataclasses.fields(ScenarioSpec)}
    unknown = set(data) - allowed
    if unknown:
        raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
    if "seat_choices" in data:
        data["seat_choices"] = tuple(data["seat_choices"])
    spec = ScenarioSpec(zone=polygon_from_json(zone) if zone is not None else None, **data)
    if seed is not None:
        spec = dataclasses.replace(spec, seed=seed)
    return spec


def _cmd_exits(args) -> int:
    net = load_network(Path(args.network).read_bytes())
    zone = polygon_from_json(_read_json(args.zone))
    exits = compute_exits(net, zone)
    _write_output(serialize.dumps(serialize.exits_to_json(exits)), args.out)
    return 0


def _cmd_plan(args) -> int:
    net = load_network(Path(args.network).read_bytes())
    zone = polygon_from_json(_read_json(args.zone))
    volunteers = serialize.volunteers_from_json(_read_json(args.volunteers))
    congestion = _load_congestion(args.congestion)
    exits = compute_exits(net, zone)
    plan = plan_routes(net, exits, volunteers, congestion, zone)
    _write_output(serialize.dumps(serialize.plan_to_json(plan)), args.out)
    return 0


def _cmd_assign(args) -> int:
    plan = serialize.plan_from_json(_read_json(args.plan))
    seekers = serialize.seekers_from_json(_read_json(args.seekers))
    cfg = AssignmentConfig(args.max_distance)
    pairs = eligible_pairs(plan.assignments, seekers, cfg)
    # seat capacities travel with the plan request, not the route file
    volunteers = serialize.volunteers_from_json(_read_json(args.volunteers))
    pickups = assign(pairs, volunteers, seekers)
    _write_output(serialize.dumps(serialize.pickups_to_json(pickups)), args.out)
    return 0


def _cmd_simulate(args) -> int:
    net = load_network(Path(args.network).read_bytes())
    plan = serialize.plan_from_json(_read_json(args.plan))
    cfg = _sim_config(args.config, args.seed)
    scheduled = {}
    if args.pickups is not None:
        pickups = serialize.pickups_from_json(_read_json(args.pickups))
        by_volunteer = {ra.volunteer_id: ra for ra in plan.assignments}
        for vid, stops in pickups.stops.items():
            if vid not in by_volunteer:
                raise ValidationError(f"pickup plan references unknown volunteer '{vid}'")
            scheduled[vid] = inject_stops(net, by_volunteer[vid], stops, cfg.dwell)
        unserved = len(pickups.unserved)
    else:
        unserved = 0
    vehicles = [
        pipeline.vehicle_from_assignment(ra, scheduled.get(ra.volunteer_id, ()))
        for ra in plan.assignments
    ]
    result = run(net, vehicles, cfg, unserved_seekers=unserved)
    _write_output(serialize.dumps(serialize.sim_result_to_json(result)), args.out)
    return 0


def _cmd_sweep(args) -> int:
    spec = _scenario_spec(args.scenario, args.seed)
    counts = [int(c) for c in args.counts.split(",") if c.strip()]
    if not counts:
        raise ValidationError("counts must name at least one vehicle count")
    rows = pipeline.sweep(spec, counts, args.reps)
    if args.out is None or args.out == "-":
        pipeline.write_sweep_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            pipeline.write_sweep_csv(rows, fh)
    return 0


def _cmd_gen_scenario(args) -> int:
    spec = _scenario_spec(args.spec, args.seed)
    scenario = generate(spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "network.json").write_text(serialize.dumps(network_to_json(scenario.network)), encoding="utf-8")
    (out_dir / "zone.json").write_text(serialize.dumps(polygon_to_json(scenario.zone)), encoding="utf-8")
    (out_dir / "volunteers.json").write_text(
        serialize.dumps(serialize.volunteers_to_json(scenario.volunteers)), encoding="utf-8")
    (out_dir / "seekers.json").write_text(
        serialize.dumps(serialize.seekers_to_json(scenario.seekers)), encoding="utf-8")
    return 0


def _cmd_convert_matsim(args) -> int:
    net, warnings = parse_matsim_network(Path(args.xml).read_bytes())
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    _write_output(serialize.dumps(network_to_json(net)), args.out)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app
    from .service.store import SessionStore

    console_dir = None
    if args.console is not None:
        console_dir = Path(args.console)
        if not console_dir.is_dir():
            raise ValidationError(f"console directory '{console_dir}' does not exist")
    store = SessionStore(data_dir=args.data)
    app = create_app(store, console_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evacnet", description="Evacuation coordination pipeline")
    parser.add_argument("--seed", type=int, default=None, help="override scenario seeds")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("exits", parents=[], help="compute zone exits")
    p.add_argument("--network", required=True)
    p.add_argument("--zone", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_exits)

    p = sub.add_parser("plan", help="plan volunteer routes to exits")
    p.add_argument("--network", required=True)
    p.add_argument("--zone", required=True)
    p.add_argument("--volunteers", required=True)
    p.add_argument("--congestion", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_plan)

    p = sub.add_parser("assign", help="assign seekers to planned routes")
    p.add_argument("--plan", required=True)
    p.add_argument("--volunteers", required=True)
    p.add_argument("--seekers", required=True)
    p.add_argument("--max-distance", type=float, default=200.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_assign)

    p = sub.add_parser("simulate", help="simulate a plan with the link-queue model")
    p.add_argument("--network", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--pickups", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("sweep", help="evacuation-time sweep over vehicle counts")
    p.add_argument("--scenario", required=True)
    p.add_argument("--counts", required=True, help="comma-separated vehicle counts")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("gen-scenario", help="write scenario files for a spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=_cmd_gen_scenario)

    p = sub.add_parser("convert-matsim", help="convert a MATSim-style network XML")
    p.add_argument("--xml", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_convert_matsim)

    p = sub.add_parser("serve", help="run the coordination service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--data", required=True, help="event-log directory")
    p.add_argument("--console", default=None, help="static console bundle to serve")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "fn", None):
        parser.print_usage(sys.stderr)
        print("error: a subcommand is required", file=sys.stderr)
        return 1
    try:
        return args.fn(args)
    except (ValidationError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ET.ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
