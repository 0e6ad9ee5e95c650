import type { ViewState } from "../store";

export interface PickerHandlers {
  select(name: string, value: string): void;
  clear(name: string): void;
}

/** One fieldset per variable, one button per value. Validity is rendered
 * exactly as the snapshot says: invalid options are greyed (aria-disabled)
 * but still clickable so the confirm flow can run. Once a variable is
 * assigned its other values are locked until it is cleared. */
export function renderPickers(
  root: HTMLElement,
  state: ViewState,
  handlers: PickerHandlers,
): void {
  root.innerHTML = "";
  for (const opt of state.options) {
    const box = document.createElement("fieldset");
    box.className = "picker";
    box.dataset.variable = opt.name;

    const legend = document.createElement("legend");
    legend.textContent = opt.name;
    box.appendChild(legend);

    opt.labels.forEach((label, i) => {
      const btn = document.createElement("button");
      btn.type = "button";
      btn.className = "option";
      btn.textContent = label;
      btn.dataset.value = label;
      const valid = opt.valid[i];
      const selected = opt.assigned === label;
      const locked = opt.assigned !== null && !selected;
      if (!valid) {
        btn.classList.add("invalid");
        btn.setAttribute("aria-disabled", "true");
      }
      if (selected) btn.classList.add("selected");
      if (locked) {
        btn.classList.add("locked");
        btn.disabled = true;
      } else {
        btn.addEventListener("click", () => {
          if (selected) handlers.clear(opt.name);
          else handlers.select(opt.name, label);
        });
      }
      box.appendChild(btn);
    });

    if (opt.assigned !== null) {
      const clearBtn = document.createElement("button");
      clearBtn.type = "button";
      clearBtn.className = "clear";
      clearBtn.textContent = "clear";
      clearBtn.addEventListener("click", () => handlers.clear(opt.name));
      box.appendChild(clearBtn);
    }
    root.appendChild(box);
  }
}

/** Test helper contract: an option counts as enabled iff it is neither
 * greyed nor locked. */
export function enabledValues(root: HTMLElement, variable: string): string[] {
  const box = root.querySelector(`fieldset[data-variable="${variable}"]`);
  if (!box) return [];
  return Array.from(box.querySelectorAll<HTMLButtonElement>("button.option"))
    .filter((b) => b.getAttribute("aria-disabled") !== "true" && !b.disabled)
    .map((b) => b.dataset.value ?? "");
}
