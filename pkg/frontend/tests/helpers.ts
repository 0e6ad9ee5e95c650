import type { Client } from "../src/api";
import type {
  ModelInfo,
  SessionEnvelope,
  WireSnapshot,
  WireVariable,
} from "../src/types";

export const TSHIRT_DOC = {
  variables: [
    { name: "x1", domain: ["black", "white", "red", "blue"] },
    { name: "x2", domain: ["small", "medium", "large"] },
    { name: "x3", domain: ["MIB", "STW"] },
  ],
  constraints: [
    { type: "expr", text: "x3 = MIB implies x1 = black" },
    { type: "expr", text: "x2 = small implies x3 != STW" },
  ],
  costs: [
    {
      name: "price",
      unary: {
        x1: { black: 0, white: 1, red: 2, blue: 3 },
        x2: { small: 0, medium: 1, large: 2 },
        x3: { MIB: 0, STW: 1 },
      },
    },
    {
      name: "quality",
      unary: {
        x1: { black: 2, white: 1, red: 1, blue: 0 },
        x2: { small: 2, medium: 1, large: 0 },
        x3: { MIB: 1, STW: 0 },
      },
    },
  ],
};

function variable(
  name: string,
  domain: string[],
  valid?: boolean[],
  assigned: string | null = null,
): WireVariable {
  return { name, domain, valid: valid ?? domain.map(() => true), assigned };
}

/** Recorded plain-mode snapshot: fresh t-shirt session, everything valid. */
export function freshSnapshot(extra: Partial<WireSnapshot> = {}): WireSnapshot {
  return {
    v: 1,
    mode: "plain",
    engine: "merged",
    variables: [
      variable("x1", ["black", "white", "red", "blue"]),
      variable("x2", ["small", "medium", "large"]),
      variable("x3", ["MIB", "STW"]),
    ],
    dead_end: false,
    relabeled: false,
    elapsed_ms: 0.4,
    ...extra,
  };
}

/** Recorded snapshot after assigning x2=small: only black/MIB survive. */
export function smallSnapshot(extra: Partial<WireSnapshot> = {}): WireSnapshot {
  return {
    v: 1,
    mode: "plain",
    engine: "merged",
    variables: [
      variable("x1", ["black", "white", "red", "blue"], [true, false, false, false]),
      variable("x2", ["small", "medium", "large"], [true, false, false], "small"),
      variable("x3", ["MIB", "STW"], [true, false]),
    ],
    dead_end: false,
    relabeled: false,
    elapsed_ms: 0.3,
    ...extra,
  };
}

export function deadEndSnapshot(): WireSnapshot {
  return {
    v: 1,
    mode: "single",
    engine: "merged",
    variables: [
      variable("x1", ["black", "white", "red", "blue"], [false, false, false, false], "blue"),
      variable("x2", ["small", "medium", "large"], [false, false, false]),
      variable("x3", ["MIB", "STW"], [false, false]),
    ],
    dead_end: true,
    relabeled: true,
    elapsed_ms: 0.5,
    bounds: { price: 2 },
    min_costs: { price: 5 },
  };
}

export const MODEL_INFO: ModelInfo = {
  model_id: "m-test",
  variables: TSHIRT_DOC.variables,
  costs: ["price", "quality"],
  stats: { solutions: 11 },
};

function envelope(snapshot: WireSnapshot): SessionEnvelope {
  return { session_id: "s-test", snapshot };
}

interface Call {
  method: string;
  args: unknown[];
}

/** Scriptable fake client. Every session mutation pulls the next snapshot
 * from a queue (or a deferred the test resolves by hand). */
export class FakeClient {
  calls: Call[] = [];
  private queue: (WireSnapshot | Promise<WireSnapshot>)[] = [];
  openSnapshot: WireSnapshot = freshSnapshot();

  pushSnapshot(s: WireSnapshot | Promise<WireSnapshot>): void {
    this.queue.push(s);
  }

  callsOf(method: string): Call[] {
    return this.calls.filter((c) => c.method === method);
  }

  private async next(method: string, args: unknown[]): Promise<SessionEnvelope> {
    this.calls.push({ method, args });
    const item = this.queue.shift();
    if (item === undefined) throw new Error(`FakeClient: no snapshot queued for ${method}`);
    return envelope(await item);
  }

  asClient(): Client {
    return {
      healthz: async () => ({ status: "ok", backend: "fake" }),
      uploadModel: async (doc: unknown) => {
        this.calls.push({ method: "uploadModel", args: [doc] });
        return MODEL_INFO;
      },
      uploadCatalogue: async (csv: string) => {
        this.calls.push({ method: "uploadCatalogue", args: [csv] });
        return MODEL_INFO;
      },
      modelStats: async () => MODEL_INFO,
      openSession: async (req) => {
        this.calls.push({ method: "openSession", args: [req] });
        return envelope(this.openSnapshot);
      },
      getSession: async (sid) => this.next("getSession", [sid]),
      assign: async (sid, name, value) => this.next("assign", [sid, name, value]),
      unassign: async (sid, name) => this.next("unassign", [sid, name]),
      setBounds: async (sid, bounds) => this.next("setBounds", [sid, bounds]),
      frontier: async () => ({ session_id: "s-test", frontier: [] }),
      closeSession: async () => undefined,
    } as Client;
  }
}

export function deferred<T>(): { promise: Promise<T>; resolve: (v: T) => void } {
  let resolve!: (v: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

export function mount(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}
