/** Panel A: choose the query table, result tables and alignment, then
 * start a session. Parse errors from the service surface inline. */

import { ApiClient, ApiError } from "../api.js";
import type { SessionDoc } from "../types.js";

export interface QueryBuilderOptions {
  api: ApiClient;
  onSession: (session: SessionDoc) => void;
}

export function renderQueryBuilder(doc: Document, opts: QueryBuilderOptions): HTMLElement {
  const root = doc.createElement("section");
  root.className = "panel query-builder";
  root.innerHTML = `
    <h2>Query builder</h2>
    <label>Query table CSV <input name="query" type="text" placeholder="/data/query.csv"></label>
    <label>Results (dir or comma-separated CSVs) <input name="results" type="text"></label>
    <label>Alignment JSON (optional) <input name="alignment" type="text"></label>
    <button name="start">Start session</button>
    <span class="digest-badge" hidden></span>
    <p class="error" role="alert" hidden></p>
  `;

  const input = (name: string) => root.querySelector<HTMLInputElement>(`input[name=${name}]`)!;
  const error = root.querySelector<HTMLElement>(".error")!;
  const badge = root.querySelector<HTMLElement>(".digest-badge")!;
  let lastDigest: string | null = null;

  root.querySelector<HTMLButtonElement>("button[name=start]")!.addEventListener("click", async () => {
    error.hidden = true;
    badge.hidden = true;
    const resultsRaw = input("results").value.trim();
    const results = resultsRaw.includes(",")
      ? resultsRaw.split(",").map((s) => s.trim())
      : resultsRaw;
    try {
      const session = await opts.api.createSession({
        query: input("query").value.trim(),
        results,
        alignment: input("alignment").value.trim() || undefined,
      });
      if (session.input_digest === lastDigest) {
        badge.textContent = "same inputs: shared result cache";
        badge.hidden = false;
      }
      lastDigest = session.input_digest;
      opts.onSession(session);
    } catch (e) {
      const err = e instanceof ApiError ? e : new ApiError(0, "network_error", String(e));
      error.textContent = `${err.code}: ${err.message}`;
      error.hidden = false;
    }
  });
  return root;
}
