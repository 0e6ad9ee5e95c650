import "./styles.css";
import { createClient } from "./api";
import { SessionStore } from "./store";
import { renderBanner } from "./ui/banner";
import { renderFrontier } from "./ui/frontier";
import { renderPickers } from "./ui/pickers";
import { renderSliders } from "./ui/sliders";

const SAMPLE = {
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

export function mountApp(root: HTMLElement, apiBase = ""): SessionStore {
  const store = new SessionStore(createClient(apiBase));

  root.innerHTML = `
    <header>
      <h1>configurator</h1>
      <form id="loader">
        <textarea id="doc" rows="6" spellcheck="false"></textarea>
        <label>mode
          <select id="mode">
            <option value="plain">plain</option>
            <option value="single">single cost</option>
            <option value="bicost">two costs</option>
            <option value="kcost">k costs</option>
            <option value="bicost-approx">two costs, approximate</option>
          </select>
        </label>
        <label>costs <input id="costs" placeholder="price,quality"></label>
        <label>bounds <input id="bounds" placeholder="6,5"></label>
        <label>&epsilon; <input id="epsilon" size="4"></label>
        <button type="submit">load</button>
      </form>
    </header>
    <div id="banner"></div>
    <main>
      <section id="pickers"></section>
      <aside>
        <section id="sliders"></section>
        <section id="frontier"></section>
      </aside>
    </main>
  `;

  const docBox = root.querySelector<HTMLTextAreaElement>("#doc")!;
  docBox.value = JSON.stringify(SAMPLE, null, 1);

  const pickersEl = root.querySelector<HTMLElement>("#pickers")!;
  const slidersEl = root.querySelector<HTMLElement>("#sliders")!;
  const frontierEl = root.querySelector<HTMLElement>("#frontier")!;
  const bannerEl = root.querySelector<HTMLElement>("#banner")!;

  const handlers = {
    select: (name: string, value: string) => store.select(name, value),
    clear: (name: string) => store.clear(name),
    moveBound: (cost: string, k: number) => store.moveBound(cost, k),
    confirmSelect: () => store.confirmSelect(),
    cancelConfirm: () => store.cancelConfirm(),
    dismissError: () => store.dismissError(),
  };

  store.subscribe((state) => {
    renderPickers(pickersEl, state, handlers);
    renderSliders(slidersEl, state, handlers);
    renderFrontier(frontierEl, state.frontier, { scaled: state.scale !== null });
    renderBanner(bannerEl, state, handlers);
  });

  root.querySelector<HTMLFormElement>("#loader")!.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const mode = root.querySelector<HTMLSelectElement>("#mode")!.value;
    const costs = root
      .querySelector<HTMLInputElement>("#costs")!
      .value.split(",")
      .map((s) => s.trim())
      .filter(Boolean);
    const bounds = root
      .querySelector<HTMLInputElement>("#bounds")!
      .value.split(",")
      .map((s) => s.trim())
      .filter(Boolean)
      .map(Number);
    const epsRaw = root.querySelector<HTMLInputElement>("#epsilon")!.value.trim();
    let doc: unknown;
    try {
      doc = JSON.parse(docBox.value);
    } catch (err) {
      bannerEl.textContent = `model document is not valid JSON: ${String(err)}`;
      return;
    }
    void store.loadModel(doc, {
      mode,
      costs,
      bounds,
      epsilon: epsRaw ? Number(epsRaw) : undefined,
    });
  });

  return store;
}

if (typeof process === "undefined" || !process.env?.VITEST) {
  const root = document.getElementById("app");
  if (root) mountApp(root);
}
