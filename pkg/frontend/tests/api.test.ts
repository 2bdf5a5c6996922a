import { describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

describe('ApiClient', () => {
  it('creates sessions with a JSON body', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse(201, { session_id: 's1', token: 't1', status: 'active' }),
    );
    const client = new ApiClient('http://svc:9000/', fetchMock);
    const created = await client.createSession({
      bundle: { scores: 'scores.tsv' },
      config: { method: 'utheoretic' },
    });
    expect(created.session_id).toBe('s1');
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe('http://svc:9000/sessions'); // trailing slash trimmed
    expect(init.method).toBe('POST');
    expect(JSON.parse(init.body).bundle.scores).toBe('scores.tsv');
  });

  it('sends the session token header on writes', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse(200, { f_beta: {}, remaining: 3, status: 'active' }),
    );
    const client = new ApiClient('http://svc', fetchMock);
    await client.validate('s1', 'secret', 'd1', ['c2', 'c1']);
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe('http://svc/sessions/s1/validate');
    expect(init.headers['X-Session-Token']).toBe('secret');
    expect(JSON.parse(init.body)).toEqual({ doc_id: 'd1', flipped: ['c2', 'c1'] });
  });

  it('maps error responses to ApiError with status and detail', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse(409, { detail: 'session is closed' }),
    );
    const client = new ApiClient('http://svc', fetchMock);
    const failure = client.next('s1');
    await expect(failure).rejects.toBeInstanceOf(ApiError);
    await expect(failure).rejects.toMatchObject({ status: 409, detail: 'session is closed' });
  });

  it('survives non-JSON error bodies', async () => {
    const fetchMock = vi.fn().mockResolvedValue(new Response('boom', { status: 500 }));
    const client = new ApiClient('http://svc', fetchMock);
    await expect(client.metrics('s1')).rejects.toMatchObject({ status: 500 });
  });

  it('closes sessions with DELETE', async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(200, { status: 'closed' }));
    const client = new ApiClient('http://svc', fetchMock);
    await client.close('s9', 'tok');
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe('http://svc/sessions/s9');
    expect(init.method).toBe('DELETE');
  });
});
