import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { AnnotatorSession } from '../src/session.js';
import type { NextDocument } from '../src/types.js';

/** A scripted fake server holding a fixed document queue. */
function fakeServer(docs: string[], classes: string[] = ['c1', 'c2']) {
  let cursor = 0;
  let closed = false;
  const validated: { doc_id: string; flipped: string[] }[] = [];
  const trajectory: { doc_id: string; f_beta: { macro: number; micro: number } }[] = [];

  const estimate = () => ({ macro: 0.5 + 0.01 * cursor, micro: 0.6 + 0.01 * cursor });

  const nextBody = (): unknown => {
    if (cursor >= docs.length) return { exhausted: true, remaining: 0 };
    const doc: NextDocument = {
      exhausted: false,
      doc_id: docs[cursor],
      predicted_labels: Object.fromEntries(classes.map((c, j) => [c, j % 2 === 0 ? 1 : -1])),
      misclassification_probabilities: Object.fromEntries(classes.map((c) => [c, 0.25])),
      remaining: docs.length - cursor,
    };
    return doc;
  };

  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    const respond = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), { status });
    if (url.endsWith('/metrics')) {
      return respond(200, {
        status: closed ? 'closed' : cursor >= docs.length ? 'exhausted' : 'active',
        validated_count: validated.length,
        remaining: docs.length - cursor,
        visited: validated.map((v) => v.doc_id),
        trajectory,
        initial_f_beta: { macro: 0.5, micro: 0.6 },
        configuration: {},
      });
    }
    if (url.endsWith('/next')) {
      if (closed) return respond(409, { detail: 'session is closed' });
      return respond(200, nextBody());
    }
    if (url.endsWith('/validate')) {
      const body = JSON.parse(String(init?.body));
      if (body.doc_id !== docs[cursor]) {
        return respond(409, { detail: `doc ${body.doc_id} is not the pending document` });
      }
      validated.push(body);
      cursor += 1;
      const point = { doc_id: body.doc_id, f_beta: estimate() };
      trajectory.push(point);
      return respond(200, {
        f_beta: point.f_beta,
        remaining: docs.length - cursor,
        status: cursor >= docs.length ? 'exhausted' : 'active',
      });
    }
    if (init?.method === 'DELETE') {
      closed = true;
      return respond(200, { status: 'closed' });
    }
    return respond(404, { detail: 'unknown route' });
  };

  return { fetchImpl, validated, trajectory, skip: () => (cursor += 1) };
}

function makeSession(server: ReturnType<typeof fakeServer>) {
  return new AnnotatorSession(new ApiClient('http://svc', server.fetchImpl), 'sid', 'tok');
}

describe('AnnotatorSession', () => {
  it('starts into reviewing with the first document', async () => {
    const server = fakeServer(['d1', 'd2']);
    const session = makeSession(server);
    const view = await session.start();
    expect(view.phase).toBe('reviewing');
    expect(view.current?.doc_id).toBe('d1');
    expect(view.remaining).toBe(2);
    expect(view.initialEstimate).toEqual({ macro: 0.5, micro: 0.6 });
  });

  it('confirm-all submits an empty flip set', async () => {
    const server = fakeServer(['d1']);
    const session = makeSession(server);
    await session.start();
    const view = await session.submit();
    expect(server.validated).toEqual([{ doc_id: 'd1', flipped: [] }]);
    expect(view.phase).toBe('exhausted');
    expect(view.visited).toEqual(['d1']);
  });

  it('flips are explicit toggles and reset after submit', async () => {
    const server = fakeServer(['d1', 'd2']);
    const session = makeSession(server);
    await session.start();
    session.toggleFlip('c2');
    session.toggleFlip('c1');
    session.toggleFlip('c2'); // toggled back to confirm
    const view = await session.submit();
    expect(server.validated[0]).toEqual({ doc_id: 'd1', flipped: ['c1'] });
    expect(view.flips.size).toBe(0);
    expect(view.current?.doc_id).toBe('d2');
  });

  it('trajectory grows only from acknowledged responses', async () => {
    const server = fakeServer(['d1', 'd2', 'd3']);
    const session = makeSession(server);
    await session.start();
    await session.submit();
    await session.submit();
    const view = session.view;
    expect(view.trajectory.map((p) => p.doc_id)).toEqual(['d1', 'd2']);
    expect(view.trajectory).toEqual(server.trajectory);
  });

  it('drives a 3-doc session to exhaustion with a final estimate', async () => {
    const server = fakeServer(['d1', 'd2', 'd3']);
    const session = makeSession(server);
    await session.start();
    let view = session.view;
    while (view.phase === 'reviewing') {
      view = await session.submit();
    }
    expect(view.phase).toBe('exhausted');
    expect(view.visited).toEqual(['d1', 'd2', 'd3']);
    expect(view.trajectory[2].f_beta.macro).toBeGreaterThan(0.5);
  });

  it('recovers from a stale-document rejection by re-fetching', async () => {
    const server = fakeServer(['d1', 'd2']);
    const session = makeSession(server);
    await session.start();
    server.skip(); // another writer consumed d1 behind our back
    const view = await session.submit();
    expect(view.lastError).toContain('not the pending document');
    expect(view.current?.doc_id).toBe('d2');
    expect(view.visited).toEqual([]); // nothing acknowledged, nothing recorded
  });

  it('rejects concurrent requests', async () => {
    const server = fakeServer(['d1']);
    const session = makeSession(server);
    const first = session.start();
    await expect(session.start()).rejects.toThrow(/in flight/);
    await first;
  });

  it('guards toggling outside review', async () => {
    const server = fakeServer([]);
    const session = makeSession(server);
    await session.start();
    expect(() => session.toggleFlip('c1')).toThrow(/no document/);
  });

  it('rejects unknown classes', async () => {
    const server = fakeServer(['d1']);
    const session = makeSession(server);
    await session.start();
    expect(() => session.toggleFlip('zzz')).toThrow(/unknown class/);
  });

  it('stop closes cleanly', async () => {
    const server = fakeServer(['d1', 'd2']);
    const session = makeSession(server);
    await session.start();
    const view = await session.stop();
    expect(view.phase).toBe('closed');
    expect(view.status).toBe('closed');
    expect(view.current).toBeNull();
  });

  it('resuming a closed session stays closed', async () => {
    const server = fakeServer(['d1']);
    const first = makeSession(server);
    await first.start();
    await first.stop();
    const second = makeSession(server);
    const view = await second.start();
    expect(view.phase).toBe('closed');
  });
});
