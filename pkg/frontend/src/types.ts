/** Payload shapes of the validation-session HTTP API (see docs/api.md). */

export interface BundleSpec {
  scores: string;
  gold?: string | null;
  estimates?: string | null;
  train_size?: number | null;
  cv_scores?: string | null;
  train_labels?: string | null;
  folds?: number;
}

export interface ConfigSpec {
  method?: 'baseline' | 'utheoretic' | 'oracle1' | 'oracle2';
  strategy?: 'static' | 'dynamic';
  averaging?: 'macro' | 'micro';
  beta?: number;
  sigma?: number | null;
  grid?: string;
}

export interface CreateSessionRequest {
  bundle: BundleSpec;
  config: ConfigSpec;
}

export interface CreateSessionResponse {
  session_id: string;
  token: string;
  status: SessionStatus;
}

export type SessionStatus = 'active' | 'exhausted' | 'closed';

/** Estimated effectiveness; empty object for unit-gain sessions. */
export interface FBetaEstimate {
  macro?: number;
  micro?: number;
}

export interface NextDocument {
  exhausted: false;
  doc_id: string;
  /** +1 / -1 per class. */
  predicted_labels: Record<string, number>;
  misclassification_probabilities: Record<string, number>;
  remaining: number;
}

export interface Exhausted {
  exhausted: true;
  remaining: 0;
}

export type NextResponse = NextDocument | Exhausted;

export interface ValidateResponse {
  f_beta: FBetaEstimate;
  remaining: number;
  status: SessionStatus;
}

export interface TrajectoryPoint {
  doc_id: string;
  f_beta: FBetaEstimate;
}

export interface MetricsResponse {
  status: SessionStatus;
  validated_count: number;
  remaining: number;
  visited: string[];
  trajectory: TrajectoryPoint[];
  initial_f_beta: FBetaEstimate | null;
  configuration: Record<string, unknown>;
}
