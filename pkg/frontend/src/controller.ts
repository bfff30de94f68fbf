/** Glue between the API, the event stream, and the view model.
 *
 * All state flows one way: server -> model -> render. On every reconnect the
 * controller refetches the snapshot, because events published while the
 * stream was down are not replayed.
 */

import { ApiError } from "./api.js";
import { ConsoleViewModel } from "./model.js";
import { StreamClient, type EventSourceFactory, type StreamOptions } from "./stream.js";
import type { ExitJson, ReplanResponse, SnapshotJson } from "./types.js";

export interface ServiceClient {
  snapshot(sessionId: string): Promise<SnapshotJson>;
  setZone(sessionId: string, vertices: [number, number][]): Promise<{ exits: ExitJson[] }>;
  replan(sessionId: string): Promise<ReplanResponse>;
  streamUrl(sessionId: string): string;
}

export class ConsoleController {
  readonly model = new ConsoleViewModel();
  private stream: StreamClient | null = null;

  constructor(
    private readonly api: ServiceClient,
    private readonly eventSourceFactory: EventSourceFactory,
    private readonly onChange: () => void = () => {},
    private readonly streamOptions: StreamOptions = {},
  ) {}

  async open(sessionId: string): Promise<void> {
    this.model.sessionId = sessionId;
    this.model.connection = "connecting";
    await this.resync();
    this.stream?.close();
    this.stream = new StreamClient(
      this.api.streamUrl(sessionId),
      this.eventSourceFactory,
      {
        onEvent: (kind, payload) => {
          this.model.applyStreamEvent(kind, payload);
          this.onChange();
        },
        onUp: () => {
          this.model.connection = "live";
          void this.resync();
        },
        onDown: () => {
          this.model.connection = "disconnected";
          this.onChange();
        },
      },
      this.streamOptions,
    );
    this.stream.connect();
  }

  async resync(): Promise<void> {
    if (!this.model.sessionId) return;
    try {
      this.model.applySnapshot(await this.api.snapshot(this.model.sessionId));
      this.model.lastError = null;
    } catch (err) {
      this.model.lastError = err instanceof Error ? err.message : String(err);
    }
    this.onChange();
  }

  /** PUT the sketched zone; any server rejection lands in model.lastError. */
  async submitZone(): Promise<boolean> {
    if (!this.model.sessionId || !this.model.canSubmitZone()) return false;
    try {
      await this.api.setZone(this.model.sessionId, this.model.zonePayload());
      this.model.clearDraft();
      this.model.lastError = null;
      this.onChange();
      return true;
    } catch (err) {
      this.model.lastError = err instanceof ApiError ? `zone rejected: ${err.message}` : String(err);
      this.onChange();
      return false;
    }
  }

  /** POST a replan; the button stays disabled until the published plan renders. */
  async triggerReplan(): Promise<boolean> {
    if (!this.model.sessionId || this.model.replanInFlight) return false;
    this.model.replanInFlight = true;
    this.onChange();
    try {
      await this.api.replan(this.model.sessionId);
      this.model.lastError = null;
      this.onChange();
      return true;
    } catch (err) {
      this.model.replanInFlight = false;
      this.model.lastError = err instanceof ApiError ? `replan failed: ${err.message}` : String(err);
      this.onChange();
      return false;
    }
  }

  close(): void {
    this.stream?.close();
    this.stream = null;
  }
}
