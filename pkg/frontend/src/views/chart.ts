// Accuracy and hit-rate history as a plain SVG line chart.

import type { MetricsRow } from "../types.js";

const W = 460;
const H = 160;
const PAD = 28;

function polyline(points: [number, number][], cls: string): SVGPolylineElement {
  const el = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
  el.setAttribute("points", points.map(([x, y]) => `${x},${y}`).join(" "));
  el.setAttribute("class", cls);
  el.setAttribute("fill", "none");
  return el;
}

export function renderChart(container: HTMLElement, metrics: MetricsRow[]): void {
  container.textContent = "";
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "history-chart");
  const maxIter = Math.max(1, metrics.length - 1);
  const x = (iter: number) => PAD + (iter / maxIter) * (W - 2 * PAD);
  const y = (value: number) => H - PAD - value * (H - 2 * PAD);

  const axis = document.createElementNS("http://www.w3.org/2000/svg", "path");
  axis.setAttribute("d", `M${PAD},${PAD} L${PAD},${H - PAD} L${W - PAD},${H - PAD}`);
  axis.setAttribute("class", "axis");
  axis.setAttribute("fill", "none");
  svg.appendChild(axis);

  const acc: [number, number][] = [];
  const hit: [number, number][] = [];
  for (const row of metrics) {
    if (row.test_accuracy !== null) acc.push([x(row.iteration), y(row.test_accuracy)]);
    hit.push([x(row.iteration), y(row.hit_rate)]);
  }
  if (acc.length) svg.appendChild(polyline(acc, "series accuracy"));
  if (hit.length) svg.appendChild(polyline(hit, "series hit-rate"));

  for (const [cls, label, offset] of [
    ["accuracy", "test accuracy", 0],
    ["hit-rate", "hit rate", 14],
  ] as const) {
    const text = document.createElementNS("http://www.w3.org/2000/svg", "text");
    text.setAttribute("x", String(W - PAD - 108));
    text.setAttribute("y", String(PAD + offset));
    text.setAttribute("class", `legend ${cls}`);
    text.textContent = label;
    svg.appendChild(text);
  }
  svg.dataset.points = String(metrics.length);
  container.appendChild(svg);
}
