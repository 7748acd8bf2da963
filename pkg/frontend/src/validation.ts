/** Client-side mirror of the plan typing rules, used only to disable
 * dropdown options; the service remains the authority. */

import type { AggregateFunc, ColumnInfo, Dtype } from "./types.js";

const NUMERIC_ONLY: AggregateFunc[] = ["SUM", "AVG", "MIN", "MAX"];

export function measureSupports(dtype: Dtype, func: AggregateFunc): boolean {
  if (dtype === "textual") return false;
  if (NUMERIC_ONLY.includes(func)) return dtype === "numerical";
  return true; // COUNT works for categorical and numerical measures
}

export interface PlanChoice {
  a?: string;
  m?: string;
  f?: AggregateFunc;
}

export function planIsValid(columns: ColumnInfo[], choice: PlanChoice): boolean {
  if (!choice.a || !choice.m || !choice.f) return false;
  if (choice.a === choice.m) return false;
  const measure = columns.find((c) => c.name === choice.m);
  if (!measure) return false;
  return measureSupports(measure.dtype, choice.f);
}

/** Which measure options remain selectable for a chosen dimension. */
export function measureDisabled(columns: ColumnInfo[], a: string | undefined, m: string): boolean {
  if (a !== undefined && m === a) return true;
  const col = columns.find((c) => c.name === m);
  return !col || col.dtype === "textual";
}

/** Which aggregate options remain selectable for a chosen measure. */
export function funcDisabled(
  columns: ColumnInfo[],
  m: string | undefined,
  f: AggregateFunc,
): boolean {
  if (m === undefined) return false;
  const col = columns.find((c) => c.name === m);
  return !col || !measureSupports(col.dtype, f);
}
