import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError } from "../src/api.js";
import { ConsoleController, type ServiceClient } from "../src/controller.js";
import type { EventSourceLike } from "../src/stream.js";
import type { ExitJson, PlanPublishedPayload, SnapshotJson } from "../src/types.js";

import fixtures from "./fixtures.json";

const baseSnapshot = fixtures.snapshot as unknown as SnapshotJson;
const planPublished = fixtures.plan_published as unknown as PlanPublishedPayload;
const zoneVertices = fixtures.zone_vertices as [number, number][];
const zoneExits = (fixtures.zone_response as { exits: ExitJson[] }).exits;

class FakeEventSource implements EventSourceLike {
  listeners = new Map<string, ((ev: MessageEvent<string>) => void)[]>();
  onopen: ((ev: unknown) => void) | null = null;
  onerror: ((ev: unknown) => void) | null = null;
  closed = false;

  addEventListener(type: string, listener: (ev: MessageEvent<string>) => void): void {
    const list = this.listeners.get(type) ?? [];
    list.push(listener);
    this.listeners.set(type, list);
  }

  close(): void {
    this.closed = true;
  }

  emit(type: string, data: unknown): void {
    for (const listener of this.listeners.get(type) ?? []) {
      listener({ data: JSON.stringify(data) } as MessageEvent<string>);
    }
  }
}

/** Server double: serves a mutable snapshot and answers the API calls the
 * console is allowed to make. */
class FakeService implements ServiceClient {
  snapshotState: SnapshotJson = structuredClone(baseSnapshot);
  zoneCalls: [number, number][][] = [];
  replanCalls = 0;
  rejectZoneWith: string | null = null;

  async snapshot(): Promise<SnapshotJson> {
    return structuredClone(this.snapshotState);
  }

  async setZone(_sid: string, vertices: [number, number][]): Promise<{ exits: ExitJson[] }> {
    if (this.rejectZoneWith) throw new ApiError(422, this.rejectZoneWith);
    this.zoneCalls.push(vertices);
    return { exits: structuredClone(zoneExits) };
  }

  async replan(): Promise<{ version: number; assigned: number; unserved: number }> {
    this.replanCalls += 1;
    return { version: this.snapshotState.plan_version + 1, assigned: 0, unserved: 0 };
  }

  streamUrl(sid: string): string {
    return `/sessions/${sid}/stream`;
  }
}

describe("ConsoleController", () => {
  let service: FakeService;
  let sources: FakeEventSource[];
  let controller: ConsoleController;

  beforeEach(() => {
    vi.useFakeTimers();
    service = new FakeService();
    sources = [];
    controller = new ConsoleController(
      service,
      () => {
        const src = new FakeEventSource();
        sources.push(src);
        return src;
      },
      () => {},
      { baseDelayMs: 100, maxDelayMs: 400 },
    );
  });

  afterEach(() => {
    controller.close();
    vi.useRealTimers();
  });

  async function openLive(): Promise<FakeEventSource> {
    await controller.open(baseSnapshot.session);
    const src = sources.at(-1)!;
    src.onopen?.({});
    await vi.runAllTimersAsync(); // flush the resync promise
    return src;
  }

  it("drawing the square fixture zone renders the four server exits", async () => {
    service.snapshotState = { ...structuredClone(baseSnapshot), zone: null, exits: [] };
    const src = await openLive();
    const model = controller.model;

    model.startDrawing();
    for (const [x, y] of zoneVertices) model.addDraftVertex(x, y);
    expect(model.canSubmitZone()).toBe(true);
    const submitted = await controller.submitZone();
    expect(submitted).toBe(true);
    expect(service.zoneCalls).toEqual([zoneVertices]);

    // the server confirms via the stream; the console renders what it pushed
    src.emit("zone-set", { zone: zoneVertices, exits: zoneExits });
    expect(model.exits).toHaveLength(4);
    expect(model.exits).toEqual(zoneExits);
    expect(model.zone).toEqual(zoneVertices);
  });

  it("surfaces a server zone rejection inline", async () => {
    await openLive();
    const model = controller.model;
    service.rejectZoneWith = "polygon is self-intersecting (edges 0 and 2)";
    model.startDrawing();
    model.addDraftVertex(0, 0);
    model.addDraftVertex(3, 2);
    model.addDraftVertex(3, 0);
    model.addDraftVertex(0, 1);
    const submitted = await controller.submitZone();
    expect(submitted).toBe(false);
    expect(model.lastError).toBe("zone rejected: polygon is self-intersecting (edges 0 and 2)");
    // the sketch survives so the operator can fix it
    expect(model.draftZone).toHaveLength(4);
  });

  it("blocks zone submission with fewer than three vertices", async () => {
    await openLive();
    controller.model.startDrawing();
    controller.model.addDraftVertex(0, 0);
    controller.model.addDraftVertex(1, 0);
    expect(await controller.submitZone()).toBe(false);
    expect(service.zoneCalls).toEqual([]);
  });

  it("replan disables the trigger until the published plan renders", async () => {
    service.snapshotState = { ...structuredClone(baseSnapshot), plan: null, pickups: null, plan_version: 0 };
    const src = await openLive();
    const model = controller.model;
    expect(model.planVersion).toBe(0);

    const done = controller.triggerReplan();
    expect(model.replanInFlight).toBe(true);
    await done;
    expect(service.replanCalls).toBe(1);
    // still in flight: the new plan has not rendered yet
    expect(model.replanInFlight).toBe(true);

    // one pushed event updates badge and layers together
    src.emit("plan-published", planPublished);
    expect(model.replanInFlight).toBe(false);
    expect(model.planVersion).toBe(planPublished.version);
    expect(model.plan).toEqual(planPublished.plan);
    expect(model.pickups).toEqual(planPublished.pickups);
  });

  it("disconnect then reconnect converges to the snapshot view", async () => {
    const src = await openLive();
    const model = controller.model;
    expect(model.connection).toBe("live");

    // stream drops: prominent disconnected state, no stale-as-fresh
    src.onerror?.({});
    expect(model.connection).toBe("disconnected");

    // while offline the server state advances (a replan we never saw)
    const advanced = structuredClone(baseSnapshot);
    advanced.plan_version = baseSnapshot.plan_version + 5;
    advanced.volunteers.push({ id: "v77", x: 123, y: -45, seats: 4, last_update: 1 });
    service.snapshotState = advanced;

    // backoff timer fires, new source opens, resync fetches the snapshot
    await vi.advanceTimersByTimeAsync(100);
    const reconnected = sources.at(-1)!;
    expect(reconnected).not.toBe(src);
    reconnected.onopen?.({});
    await vi.runAllTimersAsync();

    expect(model.connection).toBe("live");
    expect(model.planVersion).toBe(advanced.plan_version);
    expect([...model.volunteers.keys()]).toEqual(advanced.volunteers.map((v) => v.id));
    expect(model.plan).toEqual(advanced.plan);
  });
});
