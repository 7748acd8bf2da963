"""Visualization plan enumeration and multi-table group-by aggregation.

A plan groups the dimension column's domain values against an aggregate of
the measure column, evaluated once per series of the measure's series
collection. Per-table COUNT/SUM vectors are cached so repeated plans over
the same dimension share work, and AVG is always derived as SUM/COUNT.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .discretize import CellAssignment, DimensionDomain
from .errors import InvalidPlan
from .series import SeriesCollection
from .tables import CATEGORICAL, NUMERICAL, LakeTable

AGGREGATES = ("COUNT", "SUM", "AVG", "MIN", "MAX")
NUMERIC_ONLY = {"SUM", "AVG", "MIN", "MAX"}


@dataclass
class VisualizationPlan:
    plan_id: int
    a_index: int                      # dimension: query column index
    m_index: int                      # measure: query column index, or a virtual
                                      # index for an unaligned result column
    func: str
    domain: DimensionDomain
    assignment: CellAssignment
    series_source: SeriesCollection   # series over the measure column
    a_label: str = ""
    m_label: str = ""

    def triple(self, query: LakeTable | None = None) -> dict:
        a = self.a_label or (query.columns[self.a_index].header if query else str(self.a_index))
        m = self.m_label or (query.columns[self.m_index].header if query else str(self.m_index))
        return {"A": a, "M": m, "F": self.func}


@dataclass
class PlanTable:
    plan: VisualizationPlan
    labels: list[str]
    vectors: list[np.ndarray]  # one per series, length |domain|; NaN marks empty groups

    def to_payload(self, query: LakeTable) -> dict:
        return {
            "plan": self.plan.triple(query),
            "plan_id": self.plan.plan_id,
            "domain": list(self.plan.domain.values),
            "series": [
                {"label": lbl, "values": [None if np.isnan(v) else float(v) for v in vec]}
                for lbl, vec in zip(self.labels, self.vectors)
            ],
        }


class AggregateCache:
    """Per-table aggregate vectors keyed by (dimension, scope, table, measure, func)."""

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self._store: dict = {}
        self.hits = 0
        self.misses = 0

    def stats(self) -> dict:
        return {"hits": self.hits, "misses": self.misses}

    def clear(self):
        self._store.clear()
        self.hits = 0
        self.misses = 0

    def get_or_compute(self, key, compute):
        if not self.enabled:
            return compute()
        if key in self._store:
            self.hits += 1
            return self._store[key]
        self.misses += 1
        value = compute()
        self._store[key] = value
        return value


def _table_count(codes: np.ndarray, rows, d: int) -> np.ndarray:
    c = codes if rows is None else codes[rows]
    c = c[c >= 0]
    return np.bincount(c, minlength=d).astype(float)


def _table_sum(codes: np.ndarray, m_vals: np.ndarray, rows, d: int) -> np.ndarray:
    c = codes if rows is None else codes[rows]
    m = m_vals if rows is None else m_vals[rows]
    mask = (c >= 0) & np.isfinite(m)
    return np.bincount(c[mask], weights=m[mask], minlength=d)


def _table_extreme(codes: np.ndarray, m_vals: np.ndarray, rows, d: int, func: str) -> np.ndarray:
    c = codes if rows is None else codes[rows]
    m = m_vals if rows is None else m_vals[rows]
    mask = (c >= 0) & np.isfinite(m)
    out = np.full(d, np.inf if func == "MIN" else -np.inf)
    if func == "MIN":
        np.minimum.at(out, c[mask], m[mask])
    else:
        np.maximum.at(out, c[mask], m[mask])
    out[~np.isfinite(out)] = np.nan
    return out


def group_aggregate(
    plan: VisualizationPlan,
    tables: dict[str, LakeTable],
    scope: dict[str, np.ndarray] | None = None,
    scope_key: str = "full",
    cache: AggregateCache | None = None,
) -> PlanTable:
    """Evaluate one plan over the full data or a batch scope.

    A series member whose table has no dimension-aligned column contributes
    nothing; a series with no aligned member at all yields an all-NaN vector.
    """
    cache = cache or AggregateCache(enabled=False)
    d = len(plan.domain)
    labels = []
    vectors = []
    for s in plan.series_source.series:
        labels.append(s.label)
        count = np.zeros(d)
        agg = np.zeros(d)
        extremes = []
        contributed = False
        for tid, mcol in s.members:
            codes = plan.assignment.codes.get(tid)
            if codes is None:
                continue  # no dimension alignment for this member's table
            contributed = True
            rows = None if scope is None else scope.get(tid)
            if plan.func in ("COUNT", "AVG"):
                count += cache.get_or_compute(
                    (plan.a_index, scope_key, tid, "*", "COUNT"),
                    lambda codes=codes, rows=rows: _table_count(codes, rows, d),
                )
            if plan.func in ("SUM", "AVG"):
                m_vals = mcol.numeric_with_nulls()
                agg += cache.get_or_compute(
                    (plan.a_index, scope_key, tid, mcol.column_id, "SUM"),
                    lambda codes=codes, m=m_vals, rows=rows: _table_sum(codes, m, rows, d),
                )
            elif plan.func in ("MIN", "MAX"):
                m_vals = mcol.numeric_with_nulls()
                extremes.append(
                    cache.get_or_compute(
                        (plan.a_index, scope_key, tid, mcol.column_id, plan.func),
                        lambda codes=codes, m=m_vals, rows=rows: _table_extreme(
                            codes, m, rows, d, plan.func
                        ),
                    )
                )
        if not contributed:
            vectors.append(np.full(d, np.nan))
            continue
        if plan.func == "COUNT":
            vec = count
        elif plan.func == "SUM":
            vec = agg
        elif plan.func == "AVG":
            with np.errstate(invalid="ignore", divide="ignore"):
                vec = np.where(count > 0, agg / count, np.nan)
        else:
            stack = np.array(extremes) if extremes else np.full((1, d), np.nan)
            valid = np.isfinite(stack).any(axis=0)
            vec = np.full(d, np.nan)
            if valid.any():
                reduce = np.nanmin if plan.func == "MIN" else np.nanmax
                vec[valid] = reduce(stack[:, valid], axis=0)
        vectors.append(vec)
    return PlanTable(plan=plan, labels=labels, vectors=vectors)


def populated_values(
    plan: VisualizationPlan,
    tables: dict[str, LakeTable],
    cache: AggregateCache | None = None,
) -> int:
    """Number of domain values that receive at least one row across all series."""
    cache = cache or AggregateCache(enabled=False)
    d = len(plan.domain)
    total = np.zeros(d)
    for s in plan.series_source.series:
        for tid, _ in s.members:
            codes = plan.assignment.codes.get(tid)
            if codes is None:
                continue
            total += cache.get_or_compute(
                (plan.a_index, "full", tid, "*", "COUNT"),
                lambda codes=codes: _table_count(codes, None, d),
            )
    return int((total > 0).sum())


def _source_ids(query: LakeTable, q_index: int, gammas: dict[int, SeriesCollection]) -> set[str]:
    """Physical column ids feeding a query column: itself plus its series members."""
    ids = {query.columns[q_index].column_id} if q_index < len(query.columns) else set()
    sc = gammas.get(q_index)
    if sc is not None:
        for s in sc.series:
            ids.update(col.column_id for _, col in s.members)
    return ids


def enumerate_plans(
    query: LakeTable,
    tables: dict[str, LakeTable],
    gammas: dict[int, SeriesCollection],
    domains: dict[int, tuple[DimensionDomain, CellAssignment]],
    config: EngineConfig | None = None,
    cache: AggregateCache | None = None,
    measure_info: dict[int, tuple[str, str]] | None = None,
) -> list[VisualizationPlan]:
    """All valid plans in deterministic (A index, M index, aggregate) order.

    A ranges over query columns with a buildable domain; M over categorical
    and numerical measure indices (categorical M supports COUNT only).
    ``measure_info`` maps each measure index to (label, dtype); indices
    beyond the query width are virtual entries for unaligned result
    columns. Plans sharing a physical column between dimension and measure
    sources, or whose table would populate fewer than two domain values,
    are dropped.
    """
    cfg = config or EngineConfig()
    if measure_info is None:
        measure_info = {
            m: (query.columns[m].header, query.columns[m].dtype) for m in gammas
        }
    source_ids = {q: _source_ids(query, q, gammas) for q in set(gammas) | set(domains)}
    plans = []
    plan_id = 0
    for a_index in sorted(domains):
        domain, assignment = domains[a_index]
        for m_index in sorted(gammas):
            if m_index == a_index or m_index not in measure_info:
                continue
            if source_ids[a_index] & source_ids[m_index]:
                continue
            m_label, m_dtype = measure_info[m_index]
            if m_dtype not in (CATEGORICAL, NUMERICAL):
                continue
            funcs = AGGREGATES if m_dtype == NUMERICAL else ("COUNT",)
            for func in funcs:
                plan = VisualizationPlan(
                    plan_id=plan_id,
                    a_index=a_index,
                    m_index=m_index,
                    func=func,
                    domain=domain,
                    assignment=assignment,
                    series_source=gammas[m_index],
                    a_label=query.columns[a_index].header,
                    m_label=m_label,
                )
                plan_id += 1
                if len(domain) >= 2 and populated_values(plan, tables, cache) >= 2:
                    plans.append(plan)
    return plans


def validate_plan(query: LakeTable, a_index: int, m_index: int, func: str):
    if a_index == m_index:
        raise InvalidPlan("dimension and measure must differ")
    if func not in AGGREGATES:
        raise InvalidPlan(f"unknown aggregate {func!r}")
    m_dtype = query.columns[m_index].dtype
    if m_dtype not in (CATEGORICAL, NUMERICAL):
        raise InvalidPlan("measure must be categorical or numerical")
    if func in NUMERIC_ONLY and m_dtype != NUMERICAL:
        raise InvalidPlan(f"{func} requires a numerical measure")
