/** Framework-free state machine for one annotator working a session.
 *
 * The server is the single source of truth: local state only changes
 * after an acknowledged response (optimistic updates are deliberately
 * absent), per-class controls default to "confirm" so only explicit
 * flips are submitted, and no utilities or gains are ever computed on
 * the client. One request is in flight at a time.
 */

import { ApiClient, ApiError } from './api.js';
import type {
  FBetaEstimate,
  NextDocument,
  SessionStatus,
  TrajectoryPoint,
} from './types.js';

export type Phase = 'idle' | 'loading' | 'reviewing' | 'exhausted' | 'closed';

export interface SessionView {
  phase: Phase;
  status: SessionStatus;
  current: NextDocument | null;
  /** Classes the annotator has toggled to "wrong" on the current doc. */
  flips: ReadonlySet<string>;
  visited: readonly string[];
  trajectory: readonly TrajectoryPoint[];
  initialEstimate: FBetaEstimate | null;
  remaining: number;
  lastError: string | null;
}

export class AnnotatorSession {
  private phase: Phase = 'idle';
  private status: SessionStatus = 'active';
  private current: NextDocument | null = null;
  private flips = new Set<string>();
  private visited: string[] = [];
  private trajectory: TrajectoryPoint[] = [];
  private initialEstimate: FBetaEstimate | null = null;
  private remaining = 0;
  private lastError: string | null = null;
  private busy = false;

  constructor(
    private readonly client: ApiClient,
    readonly sessionId: string,
    private readonly token: string,
  ) {}

  get view(): SessionView {
    return {
      phase: this.phase,
      status: this.status,
      current: this.current,
      flips: this.flips,
      visited: this.visited,
      trajectory: this.trajectory,
      initialEstimate: this.initialEstimate,
      remaining: this.remaining,
      lastError: this.lastError,
    };
  }

  /** Serialize calls: the session is single-writer by contract. */
  private async guarded<T>(work: () => Promise<T>): Promise<T> {
    if (this.busy) {
      throw new Error('a request is already in flight for this session');
    }
    this.busy = true;
    try {
      return await work();
    } finally {
      this.busy = false;
    }
  }

  /** Fetch the session snapshot and the first document to review. */
  async start(): Promise<SessionView> {
    return this.guarded(async () => {
      this.phase = 'loading';
      const metrics = await this.client.metrics(this.sessionId);
      this.status = metrics.status;
      this.visited = [...metrics.visited];
      this.trajectory = [...metrics.trajectory];
      this.initialEstimate = metrics.initial_f_beta;
      this.remaining = metrics.remaining;
      if (metrics.status === 'closed') {
        this.phase = 'closed';
        return this.view;
      }
      await this.fetchNext();
      return this.view;
    });
  }

  /** Toggle one class between "confirm" (default) and "wrong". */
  toggleFlip(cls: string): SessionView {
    if (this.phase !== 'reviewing' || this.current === null) {
      throw new Error('no document under review');
    }
    if (!(cls in this.current.predicted_labels)) {
      throw new Error(`unknown class ${cls}`);
    }
    if (this.flips.has(cls)) {
      this.flips.delete(cls);
    } else {
      this.flips.add(cls);
    }
    return this.view;
  }

  /** Submit the verdict on the current document and advance. */
  async submit(): Promise<SessionView> {
    return this.guarded(async () => {
      if (this.phase !== 'reviewing' || this.current === null) {
        throw new Error('no document under review');
      }
      const doc = this.current.doc_id;
      const flipped = [...this.flips].sort();
      try {
        const ack = await this.client.validate(this.sessionId, this.token, doc, flipped);
        this.visited.push(doc);
        this.trajectory.push({ doc_id: doc, f_beta: ack.f_beta });
        this.status = ack.status;
        this.remaining = ack.remaining;
        this.flips = new Set();
        this.current = null;
        this.lastError = null;
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          // stale document: the server moved on without us; re-fetch
          this.lastError = err.detail;
          this.flips = new Set();
          this.current = null;
        } else {
          throw err;
        }
      }
      await this.fetchNext();
      return this.view;
    });
  }

  /** Close the session cleanly (the stop button). */
  async stop(): Promise<SessionView> {
    return this.guarded(async () => {
      await this.client.close(this.sessionId, this.token);
      this.status = 'closed';
      this.phase = 'closed';
      this.current = null;
      this.flips = new Set();
      return this.view;
    });
  }

  private async fetchNext(): Promise<void> {
    this.phase = 'loading';
    const next = await this.client.next(this.sessionId);
    if (next.exhausted) {
      this.phase = 'exhausted';
      this.status = 'exhausted';
      this.current = null;
      this.remaining = 0;
    } else {
      this.phase = 'reviewing';
      this.current = next;
      this.remaining = next.remaining;
    }
  }
}
