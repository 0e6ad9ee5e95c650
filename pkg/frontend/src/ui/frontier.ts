const NS = "http://www.w3.org/2000/svg";
const W = 320;
const H = 220;
const PAD = 32;

function svgEl(tag: string, attrs: Record<string, string | number>) {
  const el = document.createElementNS(NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

/** Scatter of the non-dominated (cost1, cost2) totals still achievable.
 * Coordinates come straight from the snapshot; in approximate mode the
 * first axis is in scaled units and is labelled so. */
export function renderFrontier(
  root: HTMLElement,
  points: number[][],
  opts: { scaled?: boolean } = {},
): void {
  root.innerHTML = "";
  if (points.length === 0) {
    const empty = document.createElement("p");
    empty.className = "frontier-empty";
    empty.textContent = "no achievable points within bounds";
    root.appendChild(empty);
    return;
  }
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => p[1]);
  const xmax = Math.max(...xs, 1);
  const ymax = Math.max(...ys, 1);
  const sx = (x: number) => PAD + (x / xmax) * (W - 2 * PAD);
  const sy = (y: number) => H - PAD - (y / ymax) * (H - 2 * PAD);

  const svg = svgEl("svg", { viewBox: `0 0 ${W} ${H}`, class: "frontier" });
  svg.appendChild(
    svgEl("line", { x1: PAD, y1: H - PAD, x2: W - PAD, y2: H - PAD, class: "axis" }),
  );
  svg.appendChild(
    svgEl("line", { x1: PAD, y1: PAD, x2: PAD, y2: H - PAD, class: "axis" }),
  );
  const xlabel = svgEl("text", { x: W / 2, y: H - 6, class: "axis-label" });
  xlabel.textContent = opts.scaled ? "cost 1 (scaled units)" : "cost 1";
  svg.appendChild(xlabel);

  for (const [a, b] of points as [number, number][]) {
    const dot = svgEl("circle", { cx: sx(a), cy: sy(b), r: 4, class: "pt" });
    const title = document.createElementNS(NS, "title");
    title.textContent = `(${a}, ${b})`;
    dot.appendChild(title);
    svg.appendChild(dot);
  }
  root.appendChild(svg);
}
