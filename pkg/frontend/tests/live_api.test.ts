/** End-to-end against a live engine instance: these tests spawn the real
 * HTTP service and drive the full UI in the DOM, asserting what a user
 * would see. */
import { type ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiError, createClient } from "../src/api";
import { mountApp } from "../src/main";
import { SessionStore } from "../src/store";
import { enabledValues, renderPickers } from "../src/ui/pickers";
import { renderFrontier } from "../src/ui/frontier";
import { TSHIRT_DOC, mount } from "./helpers";

const PORT = 8942;
const BASE = `http://127.0.0.1:${PORT}`;
let server: ChildProcess | null = null;

async function waitFor(cond: () => boolean, ms = 15000): Promise<void> {
  const t0 = Date.now();
  while (!cond()) {
    if (Date.now() - t0 > ms) throw new Error("timed out waiting for condition");
    await new Promise((r) => setTimeout(r, 25));
  }
}

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-c",
      `from mddconfig.cli import main; raise SystemExit(main(["serve", "--host", "127.0.0.1", "--port", "${PORT}"]))`,
    ],
    { stdio: "ignore" },
  );
  for (let i = 0; i < 240; i++) {
    try {
      const res = await fetch(`${BASE}/healthz`);
      if (res.ok) return;
    } catch {
      /* not listening yet */
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("API never became healthy");
}, 60000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("scripted walk through the mounted app", () => {
  it("small leaves only black and MIB; price slider to 0 leaves one option each", async () => {
    const root = mount();
    const store = mountApp(root, BASE);

    // drive the loader form like a user: single-cost session on price
    (root.querySelector("#doc") as HTMLTextAreaElement).value =
      JSON.stringify(TSHIRT_DOC);
    (root.querySelector("#mode") as HTMLSelectElement).value = "single";
    (root.querySelector("#costs") as HTMLInputElement).value = "price";
    (root.querySelector("#bounds") as HTMLInputElement).value = "6";
    root
      .querySelector("#loader")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await waitFor(() => store.getState().sessionId !== null);

    // all nine options start enabled
    expect(root.querySelectorAll("button.option")).toHaveLength(9);
    expect(enabledValues(root, "x1")).toHaveLength(4);
    expect(enabledValues(root, "x2")).toHaveLength(3);
    expect(enabledValues(root, "x3")).toHaveLength(2);

    // click small
    root
      .querySelector<HTMLButtonElement>(
        'fieldset[data-variable="x2"] button[data-value="small"]',
      )!
      .click();
    await store.whenIdle();
    expect(enabledValues(root, "x1")).toEqual(["black"]);
    expect(enabledValues(root, "x3")).toEqual(["MIB"]);
    expect(root.querySelector(".banner.dead-end")).toBeNull();

    // drag the price slider to zero
    const slider = root.querySelector<HTMLInputElement>(
      '[data-cost="price"] input[type=range]',
    )!;
    slider.value = "0";
    slider.dispatchEvent(new Event("input"));
    await store.whenIdle();
    expect(enabledValues(root, "x1")).toEqual(["black"]);
    expect(enabledValues(root, "x2")).toEqual(["small"]);
    expect(enabledValues(root, "x3")).toEqual(["MIB"]);
  });

  it("confirming a greyed pick dead-ends, clearing it recovers", async () => {
    const root = mount();
    const store = mountApp(root, BASE);
    (root.querySelector("#doc") as HTMLTextAreaElement).value =
      JSON.stringify(TSHIRT_DOC);
    (root.querySelector("#mode") as HTMLSelectElement).value = "single";
    (root.querySelector("#costs") as HTMLInputElement).value = "price";
    (root.querySelector("#bounds") as HTMLInputElement).value = "2";
    root
      .querySelector("#loader")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await waitFor(() => store.getState().sessionId !== null);

    // blue costs 3 — greyed at price <= 2, so the click asks for confirmation
    const blue = root.querySelector<HTMLButtonElement>(
      'fieldset[data-variable="x1"] button[data-value="blue"]',
    )!;
    expect(blue.getAttribute("aria-disabled")).toBe("true");
    blue.click();
    expect(root.querySelector(".banner.confirm")).not.toBeNull();
    root.querySelector<HTMLButtonElement>("button.confirm-yes")!.click();
    await store.whenIdle();
    expect(root.querySelector(".banner.dead-end")).not.toBeNull();
    expect(enabledValues(root, "x2")).toEqual([]);

    root
      .querySelector<HTMLButtonElement>('fieldset[data-variable="x1"] button.clear')!
      .click();
    await store.whenIdle();
    expect(root.querySelector(".banner.dead-end")).toBeNull();
    expect(enabledValues(root, "x2")).toHaveLength(3);
  });
});

describe("two-cost session against the live engine", () => {
  it("shows the six-point frontier and the documented domains at (2,3)", async () => {
    const store = new SessionStore(createClient(BASE));
    await store.loadModel(TSHIRT_DOC, {
      mode: "bicost",
      costs: ["price", "quality"],
      bounds: [6, 5],
    });
    expect(store.getState().error).toBeNull();
    expect(store.getState().frontier).toEqual([
      [0, 5],
      [1, 4],
      [2, 3],
      [3, 2],
      [4, 1],
      [6, 0],
    ]);
    const chart = mount();
    renderFrontier(chart, store.getState().frontier);
    expect(chart.querySelectorAll("circle.pt")).toHaveLength(6);

    store.moveBound("price", 2);
    store.moveBound("quality", 3);
    await store.whenIdle();
    expect(store.getState().frontier).toEqual([[2, 3]]);
    const pickers = mount();
    renderPickers(pickers, store.getState(), { select: () => {}, clear: () => {} });
    expect(enabledValues(pickers, "x1")).toEqual(["black"]);
    expect(enabledValues(pickers, "x2")).toEqual(["medium", "large"]);
    expect(enabledValues(pickers, "x3")).toEqual(["MIB", "STW"]);
  });

  it("surfaces engine rejections as error banners", async () => {
    const store = new SessionStore(createClient(BASE));
    await store.loadModel(TSHIRT_DOC, { mode: "bicost", costs: ["price"], bounds: [6] });
    expect(store.getState().error).toContain("exactly");
    expect(store.getState().sessionId).toBeNull();

    const client = createClient(BASE);
    await expect(client.getSession("no-such-session")).rejects.toThrowError(ApiError);
  });
});
