/** Panel E: build a custom plan from dropdowns. Invalid combinations are
 * disabled up front (same column twice, numeric aggregates on categorical
 * measures, textual measures); the service still validates on submit. */

import { ApiClient, ApiError } from "../api.js";
import { renderDetailView } from "./detailView.js";
import { AGGREGATES, type AggregateFunc, type ColumnInfo } from "../types.js";
import { funcDisabled, measureDisabled, planIsValid } from "../validation.js";

export interface PlanBuilderOptions {
  api: ApiClient;
  sessionId: string;
  columns: ColumnInfo[];
}

export function renderPlanBuilder(doc: Document, opts: PlanBuilderOptions): HTMLElement {
  const root = doc.createElement("section");
  root.className = "panel plan-builder";
  const title = doc.createElement("h2");
  title.textContent = "Plan builder";
  root.appendChild(title);

  const makeSelect = (name: string, values: string[]): HTMLSelectElement => {
    const select = doc.createElement("select");
    select.name = name;
    const blank = doc.createElement("option");
    blank.value = "";
    blank.textContent = `choose ${name}`;
    select.appendChild(blank);
    for (const v of values) {
      const opt = doc.createElement("option");
      opt.value = v;
      opt.textContent = v;
      select.appendChild(opt);
    }
    return select;
  };

  const aSelect = makeSelect("A", opts.columns.map((c) => c.name));
  const mSelect = makeSelect("M", opts.columns.map((c) => c.name));
  const fSelect = makeSelect("F", AGGREGATES);
  const evalButton = doc.createElement("button");
  evalButton.name = "evaluate";
  evalButton.textContent = "Evaluate";
  const error = doc.createElement("p");
  error.className = "error";
  error.hidden = true;
  const result = doc.createElement("div");
  result.className = "plan-result";

  const choice = () => ({
    a: aSelect.value || undefined,
    m: mSelect.value || undefined,
    f: (fSelect.value || undefined) as AggregateFunc | undefined,
  });

  const refresh = () => {
    const { a, m } = choice();
    for (const opt of Array.from(mSelect.options)) {
      if (opt.value) opt.disabled = measureDisabled(opts.columns, a, opt.value);
    }
    for (const opt of Array.from(aSelect.options)) {
      if (opt.value) opt.disabled = m !== undefined && opt.value === m;
    }
    for (const opt of Array.from(fSelect.options)) {
      if (opt.value) opt.disabled = funcDisabled(opts.columns, m, opt.value as AggregateFunc);
    }
    evalButton.disabled = !planIsValid(opts.columns, choice());
  };

  for (const select of [aSelect, mSelect, fSelect]) {
    select.addEventListener("change", refresh);
  }
  refresh();

  evalButton.addEventListener("click", async () => {
    const { a, m, f } = choice();
    if (!a || !m || !f) return;
    error.hidden = true;
    try {
      const res = await opts.api.evaluatePlan(opts.sessionId, { A: a, M: m, F: f });
      result.replaceChildren(renderDetailView(doc, res.plan_table, res.utility));
    } catch (e) {
      const err = e instanceof ApiError ? e : new ApiError(0, "network_error", String(e));
      error.textContent = `${err.code}: ${err.message}`;
      error.hidden = false;
    }
  });

  root.append(aSelect, mSelect, fSelect, evalButton, error, result);
  return root;
}
