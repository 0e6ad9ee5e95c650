import type { ViewState } from "../store";

export interface BannerHandlers {
  confirmSelect(): void;
  cancelConfirm(): void;
  dismissError(): void;
}

/** Status strip: dead-end banner, error toast, confirm dialog for greyed
 * picks, and the pending-request dot. */
export function renderBanner(
  root: HTMLElement,
  state: ViewState,
  handlers: BannerHandlers,
): void {
  root.innerHTML = "";

  if (state.deadEnd) {
    const dead = document.createElement("div");
    dead.className = "banner dead-end";
    dead.setAttribute("role", "alert");
    dead.textContent =
      "No valid completion within the current bounds — clear a choice or relax a bound.";
    root.appendChild(dead);
  }

  if (state.error !== null) {
    const toast = document.createElement("div");
    toast.className = "banner error";
    toast.setAttribute("role", "alert");
    toast.textContent = state.error;
    const x = document.createElement("button");
    x.type = "button";
    x.className = "dismiss";
    x.textContent = "×";
    x.addEventListener("click", () => handlers.dismissError());
    toast.appendChild(x);
    root.appendChild(toast);
  }

  if (state.confirm !== null) {
    const ask = document.createElement("div");
    ask.className = "banner confirm";
    const msg = document.createElement("span");
    msg.textContent =
      `${state.confirm.name} = ${state.confirm.value} is outside the current ` +
      "valid domain; picking it will leave no valid completion. Pick anyway?";
    ask.appendChild(msg);
    const yes = document.createElement("button");
    yes.type = "button";
    yes.className = "confirm-yes";
    yes.textContent = "Pick anyway";
    yes.addEventListener("click", () => handlers.confirmSelect());
    const no = document.createElement("button");
    no.type = "button";
    no.className = "confirm-no";
    no.textContent = "Cancel";
    no.addEventListener("click", () => handlers.cancelConfirm());
    ask.appendChild(yes);
    ask.appendChild(no);
    root.appendChild(ask);
  }

  if (state.pending) {
    const dot = document.createElement("span");
    dot.className = "pending";
    dot.setAttribute("aria-label", "request in flight");
    root.appendChild(dot);
  }
}
