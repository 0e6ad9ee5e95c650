import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { SessionStore } from "../src/store";
import {
  FakeClient,
  TSHIRT_DOC,
  deadEndSnapshot,
  deferred,
  freshSnapshot,
  smallSnapshot,
} from "./helpers";

function makeStore(fake: FakeClient, debounceMs = 100) {
  return new SessionStore(fake.asClient(), { debounceMs });
}

describe("loadModel", () => {
  it("uploads, opens a session and fills the pickers from the snapshot", async () => {
    const fake = new FakeClient();
    const store = makeStore(fake);
    await store.loadModel(TSHIRT_DOC);
    const s = store.getState();
    expect(s.sessionId).toBe("s-test");
    expect(s.options.map((o) => o.name)).toEqual(["x1", "x2", "x3"]);
    expect(s.options.flatMap((o) => o.valid)).toHaveLength(9);
    expect(s.options.every((o) => o.valid.every(Boolean))).toBe(true);
    expect(s.pending).toBe(false);
    expect(s.error).toBeNull();
  });

  it("surfaces API failures as an error banner, keeping state empty", async () => {
    const fake = new FakeClient();
    const client = fake.asClient();
    client.uploadModel = async () => {
      const { ApiError } = await import("../src/api");
      throw new ApiError(400, "constraint references unknown variable");
    };
    const store = new SessionStore(client);
    await store.loadModel({ bad: true });
    const s = store.getState();
    expect(s.error).toContain("400");
    expect(s.error).toContain("unknown variable");
    expect(s.sessionId).toBeNull();
    expect(s.options).toHaveLength(0);
  });

  it("passes mode, costs, bounds and epsilon through to the API", async () => {
    const fake = new FakeClient();
    fake.openSnapshot = freshSnapshot({
      mode: "bicost-approx",
      bounds: { price: 6, quality: 5 },
      min_costs: { price: 0, quality: 0 },
      frontier: [[0, 5]],
      scale: 4.5,
      exact: false,
    });
    const store = makeStore(fake);
    await store.loadModel(TSHIRT_DOC, {
      mode: "bicost-approx",
      costs: ["price", "quality"],
      bounds: [6, 5],
      epsilon: 3,
    });
    const req = fake.callsOf("openSession")[0].args[0] as Record<string, unknown>;
    expect(req.mode).toBe("bicost-approx");
    expect(req.costs).toEqual(["price", "quality"]);
    expect(req.bounds).toEqual([6, 5]);
    expect(req.epsilon).toBe(3);
    const s = store.getState();
    expect(s.bounds).toEqual({ price: 6, quality: 5 });
    expect(s.boundMax).toEqual({ price: 6, quality: 5 });
    expect(s.scale).toBe(4.5);
  });
});

describe("select and clear", () => {
  async function loaded(fake: FakeClient) {
    const store = makeStore(fake);
    await store.loadModel(TSHIRT_DOC);
    return store;
  }

  it("assigns a valid value and re-renders from the server snapshot", async () => {
    const fake = new FakeClient();
    const store = await loaded(fake);
    fake.pushSnapshot(smallSnapshot());
    store.select("x2", "small");
    await store.whenIdle();
    expect(fake.callsOf("assign")[0].args).toEqual(["s-test", "x2", "small"]);
    const s = store.getState();
    expect(s.options[0].valid).toEqual([true, false, false, false]);
    expect(s.options[1].assigned).toBe("small");
    expect(s.deadEnd).toBe(false);
  });

  it("routes greyed picks through the confirm flow instead of assigning", async () => {
    const fake = new FakeClient();
    fake.openSnapshot = freshSnapshot({
      variables: smallSnapshot().variables.map((v) => ({ ...v, assigned: null })),
    });
    const store = await loaded(fake);
    store.select("x1", "white"); // marked invalid in the snapshot
    expect(fake.callsOf("assign")).toHaveLength(0);
    expect(store.getState().confirm).toEqual({ name: "x1", value: "white" });

    fake.pushSnapshot(deadEndSnapshot());
    store.confirmSelect();
    await store.whenIdle();
    expect(fake.callsOf("assign")).toHaveLength(1);
    expect(store.getState().confirm).toBeNull();
    expect(store.getState().deadEnd).toBe(true);
  });

  it("cancelling the confirm leaves the session untouched", async () => {
    const fake = new FakeClient();
    fake.openSnapshot = freshSnapshot({
      variables: smallSnapshot().variables.map((v) => ({ ...v, assigned: null })),
    });
    const store = await loaded(fake);
    store.select("x1", "white");
    store.cancelConfirm();
    await store.whenIdle();
    expect(store.getState().confirm).toBeNull();
    expect(fake.callsOf("assign")).toHaveLength(0);
  });

  it("locks other values of an assigned variable until cleared", async () => {
    const fake = new FakeClient();
    fake.openSnapshot = smallSnapshot();
    const store = await loaded(fake);
    store.select("x2", "medium"); // locked, not a confirm candidate
    await store.whenIdle();
    expect(fake.callsOf("assign")).toHaveLength(0);
    expect(store.getState().confirm).toBeNull();

    fake.pushSnapshot(freshSnapshot());
    store.clear("x2");
    await store.whenIdle();
    expect(fake.callsOf("unassign")[0].args).toEqual(["s-test", "x2"]);
    expect(store.getState().options[1].assigned).toBeNull();
    expect(store.getState().options.every((o) => o.valid.every(Boolean))).toBe(true);
  });

  it("selecting the already-assigned value clears it", async () => {
    const fake = new FakeClient();
    fake.openSnapshot = smallSnapshot();
    const store = await loaded(fake);
    fake.pushSnapshot(freshSnapshot());
    store.select("x2", "small");
    await store.whenIdle();
    expect(fake.callsOf("unassign")).toHaveLength(1);
    expect(fake.callsOf("assign")).toHaveLength(0);
  });
});

describe("mutation serialization and sequence numbers", () => {
  it("keeps a single mutation in flight; the second waits for the first", async () => {
    const fake = new FakeClient();
    const store = makeStore(fake);
    await store.loadModel(TSHIRT_DOC);

    const first = deferred<ReturnType<typeof smallSnapshot>>();
    fake.pushSnapshot(first.promise);
    fake.pushSnapshot(freshSnapshot());

    store.select("x2", "small");
    store.select("x3", "MIB");
    await Promise.resolve();
    // only the first request has been issued so far
    expect(fake.callsOf("assign")).toHaveLength(1);
    expect(store.getState().pending).toBe(true);

    first.resolve(smallSnapshot());
    await store.whenIdle();
    expect(fake.callsOf("assign")).toHaveLength(2);
    expect(store.getState().pending).toBe(false);
  });

  it("discards stale snapshots by sequence number", async () => {
    const fake = new FakeClient();
    const store = makeStore(fake);
    await store.loadModel(TSHIRT_DOC);

    const newer = smallSnapshot();
    const older = freshSnapshot();
    expect(store.applySnapshot(newer, 5)).toBe(true);
    expect(store.applySnapshot(older, 3)).toBe(false);
    expect(store.appliedSeq).toBe(5);
    // view still shows the newer snapshot
    expect(store.getState().options[1].assigned).toBe("small");
  });

  it("reports transition errors without corrupting the view", async () => {
    const fake = new FakeClient();
    const store = makeStore(fake);
    await store.loadModel(TSHIRT_DOC);
    const client = fake.asClient();
    // poke a failing assign straight into the store's client
    (store as unknown as { client: typeof client }).client = {
      ...client,
      assign: async () => {
        const { ApiError } = await import("../src/api");
        throw new ApiError(409, "variable 'x2' is already assigned");
      },
    };
    const before = store.getState().options;
    store.select("x2", "small");
    await store.whenIdle();
    expect(store.getState().error).toContain("409");
    expect(store.getState().options).toEqual(before);
    store.dismissError();
    expect(store.getState().error).toBeNull();
  });
});

describe("bound sliders", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  async function singleStore(fake: FakeClient) {
    fake.openSnapshot = freshSnapshot({
      mode: "single",
      bounds: { price: 6 },
      min_costs: { price: 0 },
    });
    const store = makeStore(fake);
    await store.loadModel(TSHIRT_DOC, { mode: "single", costs: ["price"], bounds: [6] });
    return store;
  }

  it("debounces rapid moves into one request carrying the last value", async () => {
    const fake = new FakeClient();
    const store = await singleStore(fake);
    fake.pushSnapshot(freshSnapshot({ mode: "single", bounds: { price: 2 }, min_costs: { price: 0 } }));

    store.moveBound("price", 4);
    vi.advanceTimersByTime(40);
    store.moveBound("price", 3);
    vi.advanceTimersByTime(40);
    store.moveBound("price", 2);
    // position updates immediately, no request yet
    expect(store.getState().bounds.price).toBe(2);
    expect(fake.callsOf("setBounds")).toHaveLength(0);

    vi.advanceTimersByTime(100);
    await store.whenIdle();
    expect(fake.callsOf("setBounds")).toHaveLength(1);
    expect(fake.callsOf("setBounds")[0].args[1]).toEqual({ price: 2 });
  });

  it("coalesces several costs moved inside one debounce window", async () => {
    const fake = new FakeClient();
    fake.openSnapshot = freshSnapshot({
      mode: "bicost",
      bounds: { price: 6, quality: 5 },
      min_costs: { price: 0, quality: 0 },
      frontier: [[0, 5], [1, 4], [2, 3], [3, 2], [4, 1], [6, 0]],
    });
    const store = makeStore(fake);
    await store.loadModel(TSHIRT_DOC, {
      mode: "bicost",
      costs: ["price", "quality"],
      bounds: [6, 5],
    });
    fake.pushSnapshot(
      freshSnapshot({
        mode: "bicost",
        bounds: { price: 2, quality: 3 },
        min_costs: { price: 0, quality: 0 },
        frontier: [[2, 3]],
      }),
    );
    store.moveBound("price", 2);
    store.moveBound("quality", 3);
    vi.advanceTimersByTime(100);
    await store.whenIdle();
    expect(fake.callsOf("setBounds")).toHaveLength(1);
    expect(fake.callsOf("setBounds")[0].args[1]).toEqual({ price: 2, quality: 3 });
    expect(store.getState().frontier).toEqual([[2, 3]]);
  });

  it("ignores moves for costs the session does not bound", async () => {
    const fake = new FakeClient();
    const store = await singleStore(fake);
    store.moveBound("quality", 1);
    vi.advanceTimersByTime(200);
    await store.whenIdle();
    expect(fake.callsOf("setBounds")).toHaveLength(0);
  });
});
