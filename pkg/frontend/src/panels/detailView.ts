/** Panel D: the selected plan as a grouped bar chart with its triple and
 * exact score. */

import { formatValue, renderChart } from "../chart.js";
import type { PlanTablePayload } from "../types.js";

export function renderDetailView(
  doc: Document,
  pt: PlanTablePayload,
  score: number,
): HTMLElement {
  const root = doc.createElement("section");
  root.className = "panel detail-view";
  const title = doc.createElement("h2");
  title.textContent = `${pt.plan.F}(${pt.plan.M}) grouped by ${pt.plan.A}`;
  root.appendChild(title);

  const scoreLine = doc.createElement("p");
  scoreLine.className = "plan-score";
  scoreLine.textContent = `score ${formatValue(score)}`;
  root.appendChild(scoreLine);

  root.appendChild(renderChart(doc, pt));
  return root;
}
