// Typed client for the session API. Every mutation the studio performs goes
// through here; nothing touches session state client-side.

import type { ApiError, BatchView, MetricsRow, SessionState } from "./types.js";

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiError,
  ) {
    super(body.message || `service error ${status}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
  } catch (err) {
    throw new ServiceError(0, {
      code: "network",
      message: err instanceof Error ? err.message : "network failure",
      detail: "",
    });
  }
  if (!resp.ok) {
    let body: ApiError;
    try {
      body = (await resp.json()) as ApiError;
    } catch {
      body = { code: "http_error", message: resp.statusText, detail: "" };
    }
    throw new ServiceError(resp.status, body);
  }
  return (await resp.json()) as T;
}

export class SessionClient {
  constructor(
    readonly baseUrl: string,
    readonly sessionId: string,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}/sessions/${this.sessionId}${path}`;
  }

  getState(): Promise<SessionState> {
    return request<SessionState>(this.url(""));
  }

  getBatch(): Promise<BatchView> {
    return request<BatchView>(this.url("/batch"));
  }

  async getMetrics(): Promise<MetricsRow[]> {
    const out = await request<{ metrics: MetricsRow[] }>(this.url("/metrics"));
    return out.metrics;
  }

  postCorrections(corrections: Record<string, string>): Promise<SessionState> {
    return request<SessionState>(this.url("/corrections"), {
      method: "POST",
      body: JSON.stringify({ corrections }),
    });
  }

  postRule(label: string, dsl: string): Promise<SessionState> {
    return request<SessionState>(this.url("/rules"), {
      method: "POST",
      body: JSON.stringify({ label, dsl }),
    });
  }

  step(): Promise<{ metrics: MetricsRow; state: SessionState }> {
    return request<{ metrics: MetricsRow; state: SessionState }>(this.url("/step"), {
      method: "POST",
    });
  }
}

export function createSession(
  baseUrl: string,
  payload: Record<string, unknown>,
): Promise<{ id: string; state: SessionState }> {
  return request<{ id: string; state: SessionState }>(`${baseUrl}/sessions`, {
    method: "POST",
    body: JSON.stringify(payload),
  });
}
