/** Thin typed client for the validation-session HTTP API.
 *
 * Every method performs exactly one request; error responses are
 * surfaced as ApiError with the HTTP status so callers can distinguish
 * a stale-document rejection (409) from a missing session (404).
 */

import type {
  CreateSessionRequest,
  CreateSessionResponse,
  MetricsResponse,
  NextResponse,
  ValidateResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;

  constructor(
    baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.base = baseUrl.replace(/\/+$/, '');
  }

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, {
      ...init,
      headers: { 'Content-Type': 'application/json', ...(init.headers ?? {}) },
    });
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body === 'object' && body !== null && 'detail' in body
          ? String((body as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  createSession(req: CreateSessionRequest): Promise<CreateSessionResponse> {
    return this.request('/sessions', { method: 'POST', body: JSON.stringify(req) });
  }

  next(sessionId: string): Promise<NextResponse> {
    return this.request(`/sessions/${sessionId}/next`);
  }

  validate(
    sessionId: string,
    token: string,
    docId: string,
    flipped: string[],
  ): Promise<ValidateResponse> {
    return this.request(`/sessions/${sessionId}/validate`, {
      method: 'POST',
      headers: { 'X-Session-Token': token },
      body: JSON.stringify({ doc_id: docId, flipped }),
    });
  }

  metrics(sessionId: string): Promise<MetricsResponse> {
    return this.request(`/sessions/${sessionId}/metrics`);
  }

  close(sessionId: string, token: string): Promise<{ status: string }> {
    return this.request(`/sessions/${sessionId}`, {
      method: 'DELETE',
      headers: { 'X-Session-Token': token },
    });
  }
}
