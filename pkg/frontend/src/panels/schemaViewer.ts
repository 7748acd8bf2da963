/** Panel B: tables, column dtype badges and alignment edges. Hovering a
 * query column highlights every result column aligned to it. */

import type { SchemaDoc, TableInfo } from "../types.js";

function columnKey(table: string, column: string): string {
  return `${table}::${column}`;
}

export function renderSchemaViewer(doc: Document, schema: SchemaDoc): HTMLElement {
  const root = doc.createElement("section");
  root.className = "panel schema-viewer";
  const title = doc.createElement("h2");
  title.textContent = "Schema";
  root.appendChild(title);

  const alignedTo = new Map<string, string[]>();
  for (const entry of schema.alignment) {
    alignedTo.set(
      entry.query_column,
      entry.matches.map((m) => columnKey(m.table, m.column)),
    );
  }

  const renderTable = (table: TableInfo, isQuery: boolean): HTMLElement => {
    const box = doc.createElement("div");
    box.className = isQuery ? "table-card query-table" : "table-card";
    const h = doc.createElement("h3");
    h.textContent = `${table.table_id} (${table.row_count} rows)`;
    box.appendChild(h);
    const ul = doc.createElement("ul");
    for (const col of table.columns) {
      const li = doc.createElement("li");
      li.dataset.key = columnKey(table.table_id, col.name);
      const name = doc.createElement("span");
      name.textContent = col.name;
      const badge = doc.createElement("span");
      badge.className = `dtype-badge dtype-${col.dtype}`;
      badge.textContent = col.dtype;
      li.append(name, badge);
      if (isQuery) {
        li.addEventListener("mouseenter", () => highlight(col.name, true));
        li.addEventListener("mouseleave", () => highlight(col.name, false));
      }
      ul.appendChild(li);
    }
    box.appendChild(ul);
    return box;
  };

  const highlight = (queryColumn: string, on: boolean) => {
    for (const key of alignedTo.get(queryColumn) ?? []) {
      const safe = (globalThis as { CSS?: { escape(s: string): string } }).CSS;
      const selector = safe ? `li[data-key="${safe.escape(key)}"]` : `li[data-key="${key}"]`;
      root.querySelectorAll<HTMLElement>(selector).forEach((li) => {
        li.classList.toggle("aligned-highlight", on);
      });
    }
  };

  root.appendChild(renderTable(schema.query, true));
  const resultsBox = doc.createElement("div");
  resultsBox.className = "result-tables";
  for (const table of schema.results) resultsBox.appendChild(renderTable(table, false));
  root.appendChild(resultsBox);

  const edges = doc.createElement("ul");
  edges.className = "alignment-edges";
  for (const entry of schema.alignment) {
    for (const m of entry.matches) {
      const li = doc.createElement("li");
      li.textContent = `${schema.query.table_id}.${entry.query_column} ↔ ${m.table}.${m.column}`;
      edges.appendChild(li);
    }
  }
  root.appendChild(edges);
  return root;
}
