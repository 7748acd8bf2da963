/** JSON shapes of the recommendation service, consumed verbatim. */

export type Dtype = "categorical" | "numerical" | "textual";

export type AggregateFunc = "COUNT" | "SUM" | "AVG" | "MIN" | "MAX";

export const AGGREGATES: AggregateFunc[] = ["COUNT", "SUM", "AVG", "MIN", "MAX"];

export interface ColumnInfo {
  name: string;
  dtype: Dtype;
}

export interface TableInfo {
  table_id: string;
  name: string;
  row_count: number;
  columns: ColumnInfo[];
}

export interface AlignmentEntry {
  query_column: string;
  matches: { table: string; column: string }[];
}

export interface SchemaDoc {
  query: TableInfo;
  results: TableInfo[];
  alignment: AlignmentEntry[];
  dropped_alignments: unknown[];
}

export interface SessionDoc {
  session_id: string;
  input_digest: string;
  config: Record<string, unknown>;
  schema: SchemaDoc;
}

export interface PlanTriple {
  A: string;
  M: string;
  F: string;
}

export interface SeriesPayload {
  label: string;
  values: (number | null)[];
}

export interface PlanTablePayload {
  plan: PlanTriple;
  plan_id: number;
  domain: string[];
  series: SeriesPayload[];
}

export interface RankedPlan extends PlanTablePayload {
  rank: number;
  score: number;
}

export interface RecommendationPayload {
  config: Record<string, unknown>;
  timing_ms: number;
  cache: { hits: number; misses: number };
  prune_work: Record<string, number>;
  plans: RankedPlan[];
  cache_key: string;
}

export interface EvaluateResponse {
  plan_table: PlanTablePayload;
  utility: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
