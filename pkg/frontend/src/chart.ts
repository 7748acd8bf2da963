/** Grouped bar chart rendered as plain DOM.
 *
 * Bars carry the exact payload value in data-value (and their tooltip);
 * only the pixel height is scaled for display, so every on-screen number
 * traces back to an API field.
 */

import type { PlanTablePayload } from "./types.js";

const PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2"];

export function formatValue(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toPrecision(6);
}

export function renderChart(doc: Document, pt: PlanTablePayload, heightPx = 160): HTMLElement {
  const root = doc.createElement("figure");
  root.className = "chart";

  const finite = pt.series.flatMap((s) => s.values.filter((v): v is number => v !== null));
  const max = Math.max(...finite.map((v) => Math.abs(v)), 0);

  const plot = doc.createElement("div");
  plot.className = "chart-groups";
  pt.domain.forEach((domainValue, i) => {
    const group = doc.createElement("div");
    group.className = "chart-group";
    pt.series.forEach((series, s) => {
      const v = series.values[i];
      const bar = doc.createElement("div");
      bar.className = v === null ? "bar bar-empty" : "bar";
      bar.dataset.series = series.label;
      bar.dataset.domain = domainValue;
      if (v !== null) {
        bar.dataset.value = String(v);
        bar.title = `${series.label} @ ${domainValue}: ${formatValue(v)}`;
        const h = max > 0 ? (Math.abs(v) / max) * heightPx : 0;
        bar.style.height = `${h.toFixed(1)}px`;
        bar.style.background = PALETTE[s % PALETTE.length];
      }
      group.appendChild(bar);
    });
    const label = doc.createElement("span");
    label.className = "chart-x-label";
    label.textContent = domainValue;
    group.appendChild(label);
    plot.appendChild(group);
  });
  root.appendChild(plot);

  const legend = doc.createElement("figcaption");
  legend.className = "chart-legend";
  pt.series.forEach((series, s) => {
    const item = doc.createElement("span");
    item.className = "legend-item";
    item.textContent = series.label;
    item.style.color = PALETTE[s % PALETTE.length];
    legend.appendChild(item);
  });
  root.appendChild(legend);
  return root;
}
