/** Wire types mirrored from the HTTP API. The UI never reinterprets these —
 * validity flags are rendered exactly as received. */

export interface WireVariable {
  name: string;
  domain: string[];
  assigned: string | null;
  valid: boolean[];
}

export interface WireSnapshot {
  v: number;
  mode: string;
  engine: string;
  variables: WireVariable[];
  dead_end: boolean;
  relabeled: boolean;
  elapsed_ms: number;
  bounds?: Record<string, number>;
  min_costs?: Record<string, number>;
  frontier?: number[][];
  scale?: number;
  exact?: boolean;
}

export interface ModelInfo {
  model_id: string;
  variables: { name: string; domain: string[] }[];
  costs: string[];
  stats: Record<string, unknown>;
}

export interface SessionEnvelope {
  session_id: string;
  model_id?: string;
  snapshot: WireSnapshot;
}

export interface OpenSessionRequest {
  model_id: string;
  mode?: string;
  engine?: string;
  costs?: string[];
  bounds?: number[];
  epsilon?: number;
}
