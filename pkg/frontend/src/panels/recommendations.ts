/** Panel C: ranked plan list with scores; selecting an item drives the
 * detail view. */

import { formatValue } from "../chart.js";
import type { RankedPlan, RecommendationPayload } from "../types.js";

export interface RecommendationsOptions {
  payload: RecommendationPayload;
  cacheHit: boolean;
  onSelect: (plan: RankedPlan) => void;
}

export function renderRecommendations(doc: Document, opts: RecommendationsOptions): HTMLElement {
  const root = doc.createElement("section");
  root.className = "panel recommendations";
  const title = doc.createElement("h2");
  title.textContent = "Recommendations";
  root.appendChild(title);

  const badge = doc.createElement("span");
  badge.className = "timing-badge";
  badge.textContent = opts.cacheHit
    ? `cached result (${opts.payload.timing_ms} ms original)`
    : `computed in ${opts.payload.timing_ms} ms`;
  root.appendChild(badge);

  const list = doc.createElement("ol");
  list.className = "plan-list";
  for (const plan of opts.payload.plans) {
    const li = doc.createElement("li");
    li.dataset.planId = String(plan.plan_id);
    const button = doc.createElement("button");
    button.className = "plan-item";
    button.textContent =
      `#${plan.rank} ${plan.plan.F}(${plan.plan.M}) by ${plan.plan.A}` +
      ` — score ${formatValue(plan.score)}`;
    button.addEventListener("click", () => opts.onSelect(plan));
    li.appendChild(button);
    list.appendChild(li);
  }
  root.appendChild(list);
  return root;
}
