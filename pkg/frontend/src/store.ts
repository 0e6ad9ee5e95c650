import type { Client } from "./api";
import { ApiError } from "./api";
import type { ModelInfo, WireSnapshot } from "./types";

export interface OptionRow {
  name: string;
  labels: string[];
  valid: boolean[]; // verbatim from the last snapshot, never recomputed here
  assigned: string | null;
}

export interface ViewState {
  model: ModelInfo | null;
  sessionId: string | null;
  mode: string;
  options: OptionRow[];
  bounds: Record<string, number>; // live slider positions
  boundMax: Record<string, number>; // slider range = bounds the session opened with
  minCosts: Record<string, number>;
  frontier: number[][];
  scale: number | null;
  deadEnd: boolean;
  pending: boolean;
  error: string | null;
  confirm: { name: string; value: string } | null; // greyed pick awaiting confirm
}

type Listener = (state: ViewState) => void;

const DEBOUNCE_MS = 100;

/** Client-side session state. The server is the single source of truth:
 * every mutation round-trips and the view re-renders from the returned
 * snapshot. Mutations are serialized (one in flight), responses carry a
 * sequence number and stale ones are dropped. Slider moves are debounced
 * because relaxing a bound can trigger a relabel on the server. */
export class SessionStore {
  private client: Client;
  private state: ViewState;
  private listeners: Listener[] = [];
  private tail: Promise<void> = Promise.resolve();
  private inFlight = 0;
  private seqIssued = 0;
  private seqApplied = 0;
  private pendingBounds: Record<string, number> = {};
  private flushTimer: ReturnType<typeof setTimeout> | null = null;
  readonly debounceMs: number;

  constructor(client: Client, opts: { debounceMs?: number } = {}) {
    this.client = client;
    this.debounceMs = opts.debounceMs ?? DEBOUNCE_MS;
    this.state = {
      model: null,
      sessionId: null,
      mode: "plain",
      options: [],
      bounds: {},
      boundMax: {},
      minCosts: {},
      frontier: [],
      scale: null,
      deadEnd: false,
      pending: false,
      error: null,
      confirm: null,
    };
  }

  getState(): ViewState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  /** Settles when every queued mutation (and the debounce flush, if armed)
   * has completed. */
  async whenIdle(): Promise<void> {
    while (this.flushTimer !== null || this.inFlight > 0) {
      if (this.flushTimer !== null) this.flushBounds();
      await this.tail;
    }
  }

  get appliedSeq(): number {
    return this.seqApplied;
  }

  private emit() {
    for (const fn of this.listeners) fn(this.state);
  }

  /** Install a snapshot unless something newer already arrived. */
  applySnapshot(snap: WireSnapshot, seq: number): boolean {
    if (seq <= this.seqApplied) return false;
    this.seqApplied = seq;
    this.state = {
      ...this.state,
      mode: snap.mode,
      options: snap.variables.map((v) => ({
        name: v.name,
        labels: v.domain,
        valid: v.valid,
        assigned: v.assigned,
      })),
      bounds: { ...(snap.bounds ?? {}), ...this.pendingBounds },
      minCosts: snap.min_costs ?? {},
      frontier: snap.frontier ?? [],
      scale: snap.scale ?? null,
      deadEnd: snap.dead_end,
    };
    this.emit();
    return true;
  }

  private mutate(op: (seq: number) => Promise<WireSnapshot>): Promise<void> {
    this.inFlight += 1;
    if (this.inFlight === 1) {
      this.state = { ...this.state, pending: true };
      this.emit();
    }
    const run = async () => {
      const seq = ++this.seqIssued;
      try {
        const snap = await op(seq);
        this.applySnapshot(snap, seq);
      } catch (err) {
        this.state = {
          ...this.state,
          error: err instanceof ApiError ? err.message : String(err),
        };
        this.emit();
      } finally {
        this.inFlight -= 1;
        if (this.inFlight === 0) {
          this.state = { ...this.state, pending: false };
          this.emit();
        }
      }
    };
    this.tail = this.tail.then(run);
    return this.tail;
  }

  async loadModel(
    doc: unknown,
    opts: {
      mode?: string;
      engine?: string;
      costs?: string[];
      bounds?: number[];
      epsilon?: number;
      catalogue?: boolean;
    } = {},
  ): Promise<void> {
    this.state = { ...this.state, pending: true, error: null };
    this.emit();
    try {
      const model = opts.catalogue
        ? await this.client.uploadCatalogue(doc as string)
        : await this.client.uploadModel(doc);
      const opened = await this.client.openSession({
        model_id: model.model_id,
        mode: opts.mode ?? "plain",
        engine: opts.engine ?? "merged",
        costs: opts.costs ?? [],
        bounds: opts.bounds ?? [],
        epsilon: opts.epsilon,
      });
      this.seqIssued = 0;
      this.seqApplied = 0;
      this.pendingBounds = {};
      this.state = {
        ...this.state,
        model,
        sessionId: opened.session_id,
        boundMax: { ...(opened.snapshot.bounds ?? {}) },
        error: null,
        confirm: null,
      };
      this.applySnapshot(opened.snapshot, ++this.seqIssued);
    } catch (err) {
      this.state = {
        ...this.state,
        error: err instanceof ApiError ? err.message : String(err),
      };
    } finally {
      this.state = { ...this.state, pending: this.inFlight > 0 };
      this.emit();
    }
  }

  /** Pick a value. Valid picks go straight to the server; greyed picks ask
   * for confirmation first (the server allows them but flags a dead end).
   * Other values of an already-assigned variable are locked until cleared. */
  select(name: string, value: string): void {
    const sid = this.state.sessionId;
    const opt = this.state.options.find((o) => o.name === name);
    if (!sid || !opt) return;
    if (opt.assigned !== null) {
      if (opt.assigned === value) this.clear(name);
      return; // locked: clear before re-assigning
    }
    const idx = opt.labels.indexOf(value);
    if (idx < 0) return;
    if (!opt.valid[idx]) {
      this.state = { ...this.state, confirm: { name, value } };
      this.emit();
      return;
    }
    void this.mutate(async () => (await this.client.assign(sid, name, value)).snapshot);
  }

  confirmSelect(): void {
    const sid = this.state.sessionId;
    const c = this.state.confirm;
    if (!sid || !c) return;
    this.state = { ...this.state, confirm: null };
    this.emit();
    void this.mutate(
      async () => (await this.client.assign(sid, c.name, c.value)).snapshot,
    );
  }

  cancelConfirm(): void {
    if (!this.state.confirm) return;
    this.state = { ...this.state, confirm: null };
    this.emit();
  }

  clear(name: string): void {
    const sid = this.state.sessionId;
    if (!sid) return;
    void this.mutate(async () => (await this.client.unassign(sid, name)).snapshot);
  }

  /** Slider move: the position updates immediately, the server call is
   * debounced and coalesces every cost touched inside the window. */
  moveBound(cost: string, k: number): void {
    if (!(cost in this.state.bounds)) return;
    this.pendingBounds[cost] = k;
    this.state = {
      ...this.state,
      bounds: { ...this.state.bounds, [cost]: k },
    };
    this.emit();
    if (this.flushTimer !== null) clearTimeout(this.flushTimer);
    this.flushTimer = setTimeout(() => this.flushBounds(), this.debounceMs);
  }

  private flushBounds(): void {
    if (this.flushTimer !== null) {
      clearTimeout(this.flushTimer);
      this.flushTimer = null;
    }
    const sid = this.state.sessionId;
    const batch = this.pendingBounds;
    if (!sid || Object.keys(batch).length === 0) return;
    this.pendingBounds = {};
    void this.mutate(async () => (await this.client.setBounds(sid, batch)).snapshot);
  }

  dismissError(): void {
    if (this.state.error === null) return;
    this.state = { ...this.state, error: null };
    this.emit();
  }
}
