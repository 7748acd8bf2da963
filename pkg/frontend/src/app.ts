/** Wires the five panels to one API client. Responses for a superseded
 * session are discarded: only the latest session id may update the DOM. */

import { ApiClient } from "./api.js";
import { renderDetailView } from "./panels/detailView.js";
import { renderPlanBuilder } from "./panels/planBuilder.js";
import { renderQueryBuilder } from "./panels/queryBuilder.js";
import { renderRecommendations } from "./panels/recommendations.js";
import { renderSchemaViewer } from "./panels/schemaViewer.js";
import type { SessionDoc } from "./types.js";

export function mountApp(doc: Document, root: HTMLElement, api = new ApiClient()): void {
  let currentSession: string | null = null;

  const schemaSlot = doc.createElement("div");
  const recsSlot = doc.createElement("div");
  const detailSlot = doc.createElement("div");
  const builderSlot = doc.createElement("div");

  const onSession = async (session: SessionDoc) => {
    currentSession = session.session_id;
    schemaSlot.replaceChildren(renderSchemaViewer(doc, session.schema));
    builderSlot.replaceChildren(
      renderPlanBuilder(doc, {
        api,
        sessionId: session.session_id,
        columns: session.schema.query.columns,
      }),
    );
    const recs = await api.getRecommendations(session.session_id);
    if (currentSession !== session.session_id) return; // superseded
    recsSlot.replaceChildren(
      renderRecommendations(doc, {
        payload: recs.payload,
        cacheHit: recs.cacheHit,
        onSelect: (plan) => {
          detailSlot.replaceChildren(renderDetailView(doc, plan, plan.score));
        },
      }),
    );
  };

  root.replaceChildren(
    renderQueryBuilder(doc, { api, onSession }),
    schemaSlot,
    recsSlot,
    detailSlot,
    builderSlot,
  );
}
