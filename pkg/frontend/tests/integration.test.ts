/** Drives a real validation-session service end to end: a 10-document
 * dynamic session whose visit order must reproduce the simulation
 * engine's, with the displayed trajectory matching the server's
 * metrics replay exactly. */

import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { execFileSync, spawn, ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, dirname } from 'node:path';
import { fileURLToPath } from 'node:url';

import { ApiClient } from '../src/api.js';
import { AnnotatorSession } from '../src/session.js';

const here = dirname(fileURLToPath(import.meta.url));
const PORT = 8600 + (process.pid % 1000);
const BASE = `http://127.0.0.1:${PORT}`;

interface Expected {
  visit_order: string[];
  flips: Record<string, string[]>;
  train_size: number;
  sigma: number;
}

let dataDir: string;
let server: ChildProcess | null = null;
let expected: Expected;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/openapi.json`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error('service did not come up');
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), 'annotator-ui-'));
  execFileSync('python3', [join(here, 'fixture.py'), dataDir], { stdio: 'inherit' });
  expected = JSON.parse(readFileSync(join(dataDir, 'expected.json'), 'utf-8'));
  server = spawn('valirank', ['serve', '--port', String(PORT), '--data-dir', dataDir], {
    stdio: 'ignore',
  });
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

describe('annotator UI against a live service', () => {
  it('reproduces the simulation visit order and trajectory', async () => {
    const client = new ApiClient(BASE);
    const created = await client.createSession({
      bundle: {
        scores: 'scores.tsv',
        gold: 'gold.tsv',
        estimates: 'estimates.tsv',
        train_size: expected.train_size,
      },
      config: {
        method: 'utheoretic',
        strategy: 'dynamic',
        averaging: 'macro',
        sigma: expected.sigma,
      },
    });

    const session = new AnnotatorSession(client, created.session_id, created.token);
    let view = await session.start();
    while (view.phase === 'reviewing') {
      const doc = view.current!.doc_id;
      for (const cls of expected.flips[doc] ?? []) {
        view = session.toggleFlip(cls);
      }
      view = await session.submit();
    }

    expect(view.phase).toBe('exhausted');
    expect([...view.visited]).toEqual(expected.visit_order);

    // the server's append-only log recorded the same order
    const log = readFileSync(
      join(dataDir, 'sessions', `${created.session_id}.jsonl`),
      'utf-8',
    )
      .trim()
      .split('\n')
      .map((line) => JSON.parse(line));
    const logged = log
      .filter((event) => event.event === 'validated')
      .map((event) => event.doc_id);
    expect(logged).toEqual(expected.visit_order);

    // displayed trajectory equals the metrics replay, point for point
    const metrics = await client.metrics(created.session_id);
    expect(metrics.status).toBe('exhausted');
    expect(metrics.visited).toEqual([...view.visited]);
    expect(metrics.trajectory).toEqual([...view.trajectory]);
    expect(view.trajectory.length).toBe(expected.visit_order.length);
    for (const point of view.trajectory) {
      expect(point.f_beta.macro).toBeGreaterThanOrEqual(0);
      expect(point.f_beta.macro).toBeLessThanOrEqual(1);
      expect(point.f_beta.micro).toBeGreaterThanOrEqual(0);
      expect(point.f_beta.micro).toBeLessThanOrEqual(1);
    }
  }, 60_000);
});
