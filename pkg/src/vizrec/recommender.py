"""End-to-end recommendation pipeline behind an estimator-style API.

``fit`` ingests the query table, result tables and alignment and builds
dimension domains and measure series; ``recommend`` (alias ``predict``)
ranks plans, optionally through batched confidence-bound pruning.
"""

from __future__ import annotations

import time

from sklearn.base import BaseEstimator

from .config import EngineConfig
from .discretize import build_domain
from .errors import EmptyColumn, EmptyDomain, InvalidPlan, VizrecError
from .fastpath import BatchScorer
from .plans import (
    AggregateCache,
    VisualizationPlan,
    enumerate_plans,
    group_aggregate,
    validate_plan,
)
from .prune import candidate_generation, final_rank, make_batches
from .series import SeriesCollection, create_series
from .tables import (
    CATEGORICAL,
    NUMERICAL,
    AlignmentMap,
    LakeTable,
    baseline_align,
)
from .utility import utility


def schema_document(
    query: LakeTable, results: dict[str, LakeTable], alignment: AlignmentMap
) -> dict:
    """JSON-friendly view of the session's tables, dtypes and alignment edges."""

    def describe(table: LakeTable) -> dict:
        return {
            "table_id": table.table_id,
            "name": table.name,
            "row_count": table.row_count,
            "columns": [{"name": c.header, "dtype": c.dtype} for c in table.columns],
        }

    return {
        "query": describe(query),
        "results": [describe(results[tid]) for tid in sorted(results)],
        "alignment": [
            {
                "query_column": query.columns[q].header,
                "matches": [
                    {"table": tid, "column": results[tid].columns[c].header}
                    for tid, c in pairs
                ],
            }
            for q, pairs in sorted(alignment.entries.items())
        ],
        "dropped_alignments": alignment.dropped,
    }


class VisualizationRecommender(BaseEstimator):
    """Recommend the top-n most interesting multi-table bar-chart plans.

    Parameters mirror the engine config; ``fit`` takes the data, and
    ``recommend`` returns ranked (plan, score, table) triples.
    """

    def __init__(
        self,
        n: int = 10,
        n_prime: int = 0,
        strategy: str = "stats",
        prune: bool = True,
        batch_count: int = 10,
        delta: float = 0.05,
        W: int = 500,
        bin_count: int = 10,
        include_unaligned_measures: bool = False,
        seed: int = 0,
    ):
        self.n = n
        self.n_prime = n_prime
        self.strategy = strategy
        self.prune = prune
        self.batch_count = batch_count
        self.delta = delta
        self.W = W
        self.bin_count = bin_count
        self.include_unaligned_measures = include_unaligned_measures
        self.seed = seed

    # -- pipeline -----------------------------------------------------

    def config(self) -> EngineConfig:
        return EngineConfig(
            n=self.n,
            n_prime=self.n_prime,
            strategy=self.strategy,
            prune=self.prune,
            batch_count=self.batch_count,
            delta=self.delta,
            W=self.W,
            bin_count=self.bin_count,
            include_unaligned_measures=self.include_unaligned_measures,
            seed=self.seed,
        )

    def fit(
        self,
        query: LakeTable,
        results: dict[str, LakeTable],
        alignment: AlignmentMap | None = None,
    ) -> "VisualizationRecommender":
        cfg = self.config()
        start = time.perf_counter()
        if alignment is None:
            alignment = baseline_align(query, results, cfg)

        self.query_ = query
        self.results_ = dict(results)
        self.alignment_ = alignment
        self.tables_ = {query.table_id: query, **self.results_}
        self.cache_ = AggregateCache()

        self.gammas_: dict[int, SeriesCollection] = {}
        self.domains_ = {}
        self.measure_info_: dict[int, tuple[str, str]] = {}
        for q_index, qcol in enumerate(query.columns):
            cols = [(query.table_id, qcol)]
            for tid, c_idx in alignment.aligned(q_index):
                cols.append((tid, self.results_[tid].columns[c_idx]))
            try:
                self.gammas_[q_index] = create_series(q_index, cols, cfg.strategy, cfg)
                self.domains_[q_index] = build_domain(cols, cfg)
            except (EmptyColumn, EmptyDomain):
                continue  # all-null column: no domain, no series
            self.measure_info_[q_index] = (qcol.header, qcol.dtype)

        if cfg.include_unaligned_measures:
            self._add_unaligned_measures(cfg)

        self.plans_ = enumerate_plans(
            query,
            self.tables_,
            self.gammas_,
            self.domains_,
            cfg,
            self.cache_,
            self.measure_info_,
        )
        self.fit_seconds_ = time.perf_counter() - start
        return self

    def _add_unaligned_measures(self, cfg: EngineConfig):
        """Result columns aligned to no query column become extra measures
        with a singleton series over their own table."""
        aligned = {
            (tid, c_idx)
            for pairs in self.alignment_.entries.values()
            for tid, c_idx in pairs
        }
        virtual = len(self.query_.columns)
        for tid in sorted(self.results_):
            for c_idx, col in enumerate(self.results_[tid].columns):
                if (tid, c_idx) in aligned or col.dtype not in (CATEGORICAL, NUMERICAL):
                    continue
                if not col.non_null():
                    continue
                self.gammas_[virtual] = create_series(virtual, [(tid, col)], "nomerge", cfg)
                self.measure_info_[virtual] = (f"{tid}.{col.header}", col.dtype)
                virtual += 1

    def recommend(self) -> list[tuple[VisualizationPlan, float, object]]:
        """Ranked (plan, exact utility, PlanTable) for the fitted session."""
        if not hasattr(self, "plans_"):
            raise VizrecError("fit must be called before recommend")
        cfg = self.config()
        start = time.perf_counter()
        self.prune_work_ = {"evaluations": 0, "pruned": 0, "batches": 0}

        if cfg.prune:
            batches = make_batches(self.tables_, cfg.batch_count, cfg.seed)
            scorer = BatchScorer(self.tables_, batches)
            by_dimension: dict[int, list[VisualizationPlan]] = {}
            for plan in self.plans_:
                by_dimension.setdefault(plan.a_index, []).append(plan)
            candidates = []
            for a_index in sorted(by_dimension):
                chosen = candidate_generation(
                    by_dimension[a_index],
                    self.tables_,
                    batches,
                    cfg.resolved_n_prime(),
                    cfg,
                    self.cache_,
                    self.prune_work_,
                    scorer=scorer,
                )
                candidates.extend(p for p, _ in chosen)
        else:
            candidates = list(self.plans_)

        ranked = final_rank(candidates, self.tables_, cfg.n, self.cache_)
        self.recommend_seconds_ = time.perf_counter() - start
        self.last_ranked_ = ranked
        return ranked

    def predict(self, X=None):  # estimator-style alias
        return self.recommend()

    def evaluate_plan(self, a_ref, m_ref, func: str):
        """Exact evaluation of one explicit ⟨A, M, F⟩ triple."""
        if not hasattr(self, "plans_"):
            raise VizrecError("fit must be called before evaluate_plan")
        a_index = self.query_.column_index(a_ref)
        m_index = self.query_.column_index(m_ref)
        validate_plan(self.query_, a_index, m_index, func)
        if a_index not in self.domains_:
            raise InvalidPlan(f"column {a_ref!r} has no buildable dimension domain")
        if m_index not in self.gammas_:
            raise InvalidPlan(f"column {m_ref!r} has no measure series")
        domain, assignment = self.domains_[a_index]
        plan = VisualizationPlan(
            plan_id=-1,
            a_index=a_index,
            m_index=m_index,
            func=func.upper(),
            domain=domain,
            assignment=assignment,
            series_source=self.gammas_[m_index],
            a_label=self.query_.columns[a_index].header,
            m_label=self.query_.columns[m_index].header,
        )
        pt = group_aggregate(plan, self.tables_, scope=None, scope_key="full", cache=self.cache_)
        return pt, utility(pt)

    # -- reporting ----------------------------------------------------

    def schema_payload(self) -> dict:
        return schema_document(self.query_, self.results_, self.alignment_)

    def recommendation_payload(self) -> dict:
        ranked = self.last_ranked_ if hasattr(self, "last_ranked_") else self.recommend()
        return {
            "config": self.config().to_dict(),
            "timing_ms": round(self.recommend_seconds_ * 1000.0, 3),
            "cache": self.cache_.stats(),
            "prune_work": self.prune_work_,
            "plans": [
                {
                    "rank": i + 1,
                    "score": score,
                    **pt.to_payload(self.query_),
                }
                for i, (plan, score, pt) in enumerate(ranked)
            ],
        }
