import type { ViewState } from "../store";

export interface SliderHandlers {
  moveBound(cost: string, k: number): void;
}

/** One range slider per active cost bound, with the current bound value and
 * the minimum achievable cost under the present assignment. */
export function renderSliders(
  root: HTMLElement,
  state: ViewState,
  handlers: SliderHandlers,
): void {
  root.innerHTML = "";
  for (const [cost, value] of Object.entries(state.bounds)) {
    const row = document.createElement("div");
    row.className = "slider-row";
    row.dataset.cost = cost;

    const label = document.createElement("label");
    label.textContent = `${cost} ≤ `;
    const readout = document.createElement("output");
    readout.className = "bound-value";
    readout.textContent = String(value);
    label.appendChild(readout);

    const input = document.createElement("input");
    input.type = "range";
    input.min = "0";
    input.max = String(state.boundMax[cost] ?? value);
    input.step = "1";
    input.value = String(value);
    input.addEventListener("input", () => {
      readout.textContent = input.value;
      handlers.moveBound(cost, Number(input.value));
    });

    const min = document.createElement("span");
    min.className = "min-cost";
    const m = state.minCosts[cost];
    min.textContent = m === undefined ? "" : `min ${m}`;

    row.appendChild(label);
    row.appendChild(input);
    row.appendChild(min);
    root.appendChild(row);
  }
}
