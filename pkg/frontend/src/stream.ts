/** Reconnecting server-sent-events client.
 *
 * The native EventSource reconnects on its own, but we manage the lifecycle
 * explicitly so a drop is (a) visible in the UI and (b) followed by a full
 * snapshot resync once the stream is back — events missed while offline are
 * not replayed by the server.
 */

export interface EventSourceLike {
  addEventListener(type: string, listener: (ev: MessageEvent<string>) => void): void;
  close(): void;
  // `any` keeps the native EventSource assignable under strictFunctionTypes
  onopen: ((ev: any) => void) | null;
  onerror: ((ev: any) => void) | null;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface StreamHandlers {
  /** A named SSE event arrived (plan-published, client-updated, zone-set). */
  onEvent(kind: string, payload: unknown): void;
  /** Stream is live (fires on first connect and on every reconnect). */
  onUp(): void;
  /** Stream dropped; a reconnect is scheduled. */
  onDown(): void;
}

export interface StreamOptions {
  baseDelayMs?: number;
  maxDelayMs?: number;
  setTimeoutFn?: (fn: () => void, ms: number) => unknown;
}

export const STREAM_EVENT_KINDS = ["plan-published", "client-updated", "zone-set"] as const;

export class StreamClient {
  private source: EventSourceLike | null = null;
  private attempt = 0;
  private closed = false;
  private readonly baseDelayMs: number;
  private readonly maxDelayMs: number;
  private readonly setTimeoutFn: (fn: () => void, ms: number) => unknown;

  constructor(
    private readonly url: string,
    private readonly factory: EventSourceFactory,
    private readonly handlers: StreamHandlers,
    options: StreamOptions = {},
  ) {
    this.baseDelayMs = options.baseDelayMs ?? 500;
    this.maxDelayMs = options.maxDelayMs ?? 8000;
    this.setTimeoutFn = options.setTimeoutFn ?? ((fn, ms) => setTimeout(fn, ms));
  }

  connect(): void {
    if (this.closed) return;
    const source = this.factory(this.url);
    this.source = source;
    source.onopen = () => {
      this.attempt = 0;
      this.handlers.onUp();
    };
    source.onerror = () => {
      if (this.closed) return;
      source.close();
      this.source = null;
      this.handlers.onDown();
      this.setTimeoutFn(() => this.connect(), this.nextDelay());
    };
    for (const kind of STREAM_EVENT_KINDS) {
      source.addEventListener(kind, (ev) => {
        this.handlers.onEvent(kind, JSON.parse(ev.data));
      });
    }
  }

  /** Exponential backoff: base * 2^attempt, capped. */
  nextDelay(): number {
    const delay = Math.min(this.baseDelayMs * 2 ** this.attempt, this.maxDelayMs);
    this.attempt += 1;
    return delay;
  }

  close(): void {
    this.closed = true;
    this.source?.close();
    this.source = null;
  }
}
