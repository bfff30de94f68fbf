/** Console view model: everything the renderer draws, nothing it computes.
 *
 * Invariant: the plan version, route layer, and pickup layer change together
 * in one synchronous call, so the badge can never show a version other than
 * the one whose geometry is on screen.
 */

import type {
  ClientUpdatedPayload,
  ExitJson,
  NetworkJson,
  PickupsJson,
  PlanJson,
  PlanPublishedPayload,
  SeekerJson,
  SnapshotJson,
  VolunteerJson,
  ZoneSetPayload,
} from "./types.js";

export type ConnectionState = "connecting" | "live" | "disconnected";

export interface FeedEntry {
  seq: number;
  text: string;
}

export class ConsoleViewModel {
  sessionId: string | null = null;
  network: NetworkJson | null = null;
  zone: [number, number][] | null = null;
  exits: ExitJson[] = [];
  volunteers = new Map<string, VolunteerJson>();
  seekers = new Map<string, SeekerJson>();
  planVersion = 0;
  plan: PlanJson | null = null;
  pickups: PickupsJson | null = null;

  /** Zone being drawn; not submitted yet. */
  draftZone: [number, number][] = [];
  drawing = false;

  connection: ConnectionState = "connecting";
  replanInFlight = false;
  lastError: string | null = null;
  feed: FeedEntry[] = [];
  private feedSeq = 0;

  private readonly feedLimit = 60;

  noteFeed(text: string): void {
    this.feedSeq += 1;
    this.feed.push({ seq: this.feedSeq, text });
    if (this.feed.length > this.feedLimit) {
      this.feed.splice(0, this.feed.length - this.feedLimit);
    }
  }

  /** Full resync; the single source of truth after (re)connecting. */
  applySnapshot(snap: SnapshotJson): void {
    this.sessionId = snap.session;
    this.network = snap.network;
    this.zone = snap.zone;
    this.exits = snap.exits;
    this.volunteers = new Map(snap.volunteers.map((v) => [v.id, v]));
    this.seekers = new Map(snap.seekers.map((s) => [s.id, s]));
    this.planVersion = snap.plan_version;
    this.plan = snap.plan;
    this.pickups = snap.pickups;
    if (this.replanInFlight && snap.plan_version > 0) {
      this.replanInFlight = false;
    }
  }

  /** Atomic: badge and plan layers move together. */
  applyPlanPublished(payload: PlanPublishedPayload): void {
    this.planVersion = payload.version;
    this.plan = payload.plan;
    this.pickups = payload.pickups;
    this.replanInFlight = false;
    this.noteFeed(
      `plan v${payload.version}: ${payload.plan.routes.length} routes, ` +
        `${Object.keys(payload.pickups.assignments).length} assigned, ` +
        `${payload.pickups.unserved.length} unserved`,
    );
  }

  applyClientUpdated(payload: ClientUpdatedPayload): void {
    if ("client" in payload) {
      const client = payload.client;
      if (payload.role === "volunteer") {
        this.volunteers.set(client.id, client as VolunteerJson);
      } else {
        this.seekers.set(client.id, client as SeekerJson);
      }
      this.noteFeed(`${payload.role} ${client.id} registered`);
      return;
    }
    const existing = payload.role === "volunteer" ? this.volunteers.get(payload.id) : this.seekers.get(payload.id);
    if (existing) {
      existing.x = payload.x;
      existing.y = payload.y;
    }
    this.noteFeed(`${payload.role} ${payload.id} moved`);
  }

  applyZoneSet(payload: ZoneSetPayload): void {
    this.zone = payload.zone;
    this.exits = payload.exits;
    this.draftZone = [];
    this.drawing = false;
    this.noteFeed(`zone set: ${payload.exits.length} exits`);
  }

  applyStreamEvent(kind: string, payload: unknown): void {
    if (kind === "plan-published") {
      this.applyPlanPublished(payload as PlanPublishedPayload);
    } else if (kind === "client-updated") {
      this.applyClientUpdated(payload as ClientUpdatedPayload);
    } else if (kind === "zone-set") {
      this.applyZoneSet(payload as ZoneSetPayload);
    }
  }

  // -- zone drawing ---------------------------------------------------------

  startDrawing(): void {
    this.drawing = true;
    this.draftZone = [];
  }

  addDraftVertex(x: number, y: number): void {
    if (this.drawing) this.draftZone.push([x, y]);
  }

  clearDraft(): void {
    this.draftZone = [];
    this.drawing = false;
  }

  /** Local gate: the server requires at least 3 vertices. */
  canSubmitZone(): boolean {
    return this.draftZone.length >= 3;
  }

  zonePayload(): [number, number][] {
    return this.draftZone.map(([x, y]) => [x, y]);
  }

  // -- derived rendering data ----------------------------------------------

  /** Stops of the current plan, flattened for the renderer. */
  planStops(): { volunteerId: string; x: number; y: number }[] {
    if (!this.pickups) return [];
    const out: { volunteerId: string; x: number; y: number }[] = [];
    for (const [vid, stops] of Object.entries(this.pickups.stops)) {
      for (const stop of stops) {
        out.push({ volunteerId: vid, x: stop.x, y: stop.y });
      }
    }
    return out;
  }

  assignedCount(): number {
    return this.pickups ? Object.keys(this.pickups.assignments).length : 0;
  }

  unservedCount(): number {
    return this.pickups ? this.pickups.unserved.length : 0;
  }
}
