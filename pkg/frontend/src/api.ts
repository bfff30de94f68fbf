/** Thin fetch wrappers over the service endpoints. The console never
 * computes plans or exits itself; everything displayed comes from here or
 * from the event stream. */

import type { ExitJson, NetworkJson, ReplanResponse, SnapshotJson } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let detail = `HTTP ${resp.status}`;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* non-JSON error body: keep the status text */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class Api {
  constructor(private readonly base: string = "") {}

  listSessions(): Promise<{ sessions: string[] }> {
    return request(`${this.base}/sessions`);
  }

  createSession(network: NetworkJson): Promise<{ id: string }> {
    return request(`${this.base}/sessions`, {
      method: "POST",
      body: JSON.stringify({ network }),
    });
  }

  snapshot(sessionId: string): Promise<SnapshotJson> {
    return request(`${this.base}/sessions/${sessionId}/snapshot`);
  }

  setZone(sessionId: string, vertices: [number, number][]): Promise<{ exits: ExitJson[] }> {
    return request(`${this.base}/sessions/${sessionId}/zone`, {
      method: "PUT",
      body: JSON.stringify(vertices),
    });
  }

  replan(sessionId: string): Promise<ReplanResponse> {
    return request(`${this.base}/sessions/${sessionId}/replan`, { method: "POST" });
  }

  streamUrl(sessionId: string): string {
    return `${this.base}/sessions/${sessionId}/stream`;
  }
}
