import { describe, expect, it } from "vitest";

import { ConsoleViewModel } from "../src/model.js";
import type { PlanPublishedPayload, SnapshotJson, ZoneSetPayload } from "../src/types.js";

import fixtures from "./fixtures.json";

const snapshot = fixtures.snapshot as unknown as SnapshotJson;
const zoneResponse = fixtures.zone_response as unknown as { exits: ZoneSetPayload["exits"] };
const planPublished = fixtures.plan_published as unknown as PlanPublishedPayload;

describe("zone drawing", () => {
  it("blocks submission until three vertices are placed", () => {
    const model = new ConsoleViewModel();
    model.startDrawing();
    model.addDraftVertex(-500, -500);
    model.addDraftVertex(500, -500);
    expect(model.canSubmitZone()).toBe(false);
    model.addDraftVertex(500, 500);
    expect(model.canSubmitZone()).toBe(true);
  });

  it("ignores clicks while not in drawing mode", () => {
    const model = new ConsoleViewModel();
    model.addDraftVertex(1, 2);
    expect(model.draftZone).toEqual([]);
  });

  it("serializes the sketch as [x, y] pairs", () => {
    const model = new ConsoleViewModel();
    model.startDrawing();
    for (const [x, y] of fixtures.zone_vertices as [number, number][]) {
      model.addDraftVertex(x, y);
    }
    expect(model.zonePayload()).toEqual(fixtures.zone_vertices);
  });

  it("renders the four exit markers the server returned for the square zone", () => {
    const model = new ConsoleViewModel();
    model.applyZoneSet({
      zone: fixtures.zone_vertices as [number, number][],
      exits: zoneResponse.exits,
    });
    expect(model.exits).toHaveLength(4);
    expect(model.exits.map((e) => e.id)).toEqual([
      "exit-lce-0",
      "exit-lcn-0",
      "exit-lcs-0",
      "exit-lcw-0",
    ]);
    // marker positions are exactly the server's crossing points
    expect(model.exits.map((e) => [e.x, e.y])).toEqual([
      [500, 0],
      [0, 500],
      [0, -500],
      [-500, 0],
    ]);
    // the sketch is cleared once the zone is live
    expect(model.draftZone).toEqual([]);
    expect(model.drawing).toBe(false);
  });
});

describe("plan publication", () => {
  it("updates version badge and plan layers in one event", () => {
    const model = new ConsoleViewModel();
    model.applySnapshot({ ...snapshot, plan: null, pickups: null, plan_version: 0 });
    expect(model.planVersion).toBe(0);
    expect(model.plan).toBeNull();

    model.replanInFlight = true;
    model.applyStreamEvent("plan-published", planPublished);

    // one synchronous application: badge, routes, and pickups all moved
    expect(model.planVersion).toBe(planPublished.version);
    expect(model.plan).toEqual(planPublished.plan);
    expect(model.pickups).toEqual(planPublished.pickups);
    expect(model.replanInFlight).toBe(false);
  });

  it("never shows a version without its plan geometry", () => {
    const model = new ConsoleViewModel();
    const states: { version: number; routes: number }[] = [];
    const record = () =>
      states.push({ version: model.planVersion, routes: model.plan?.routes.length ?? 0 });
    record();
    model.applyStreamEvent("plan-published", planPublished);
    record();
    for (const state of states) {
      if (state.version > 0) expect(state.routes).toBeGreaterThan(0);
      if (state.version === 0) expect(state.routes).toBe(0);
    }
  });

  it("derives stop markers and counts from the pickups", () => {
    const model = new ConsoleViewModel();
    model.applyPlanPublished(planPublished);
    expect(model.assignedCount()).toBe(Object.keys(planPublished.pickups.assignments).length);
    expect(model.unservedCount()).toBe(planPublished.pickups.unserved.length);
    const stops = model.planStops();
    const expected = Object.values(planPublished.pickups.stops).reduce((n, s) => n + s.length, 0);
    expect(stops).toHaveLength(expected);
  });
});

describe("client updates", () => {
  it("applies a registration to the right layer", () => {
    const model = new ConsoleViewModel();
    model.applyStreamEvent("client-updated", {
      role: "volunteer",
      client: { id: "v9", x: 1, y: 2, seats: 3 },
    });
    expect(model.volunteers.get("v9")).toMatchObject({ x: 1, y: 2, seats: 3 });
    expect(model.seekers.size).toBe(0);
  });

  it("moves only the updated marker", () => {
    const model = new ConsoleViewModel();
    model.applySnapshot(snapshot);
    const others = [...model.seekers.values()].map((s) => ({ ...s }));
    const vid = snapshot.volunteers[0]!.id;
    model.applyStreamEvent("client-updated", { id: vid, x: 99, y: 88, role: "volunteer" });
    expect(model.volunteers.get(vid)).toMatchObject({ x: 99, y: 88 });
    expect([...model.seekers.values()]).toEqual(others);
  });
});

describe("snapshot resync", () => {
  it("replaces the whole view atomically", () => {
    const model = new ConsoleViewModel();
    // stale local state from before a (simulated) disconnect
    model.planVersion = 99;
    model.volunteers.set("ghost", { id: "ghost", x: 0, y: 0, seats: 1 });

    model.applySnapshot(snapshot);

    expect(model.sessionId).toBe(snapshot.session);
    expect(model.planVersion).toBe(snapshot.plan_version);
    expect(model.plan).toEqual(snapshot.plan);
    expect([...model.volunteers.keys()]).toEqual(snapshot.volunteers.map((v) => v.id));
    expect([...model.seekers.keys()]).toEqual(snapshot.seekers.map((s) => s.id));
    expect(model.zone).toEqual(snapshot.zone);
    expect(model.exits).toEqual(snapshot.exits);
  });
});
