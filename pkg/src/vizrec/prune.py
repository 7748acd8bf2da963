"""Batched candidate generation with confidence-bound pruning, plus exact
final ranking.

Per-batch utility estimates feed a running mean per plan; a without-
replacement concentration bound turns the mean into an interval, and plans
whose upper bound falls below the lower bound of the current top candidates
are dropped permanently. Scores are rescaled into [0, 1] inside the bound
only; reported utilities stay raw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .errors import DomainError
from .plans import AggregateCache, PlanTable, VisualizationPlan, group_aggregate
from .tables import LakeTable
from .utility import utility


@dataclass
class Batch:
    batch_index: int
    rows: dict[str, np.ndarray]  # per-table row indices


@dataclass
class BoundedEstimate:
    mean: float = 0.0   # running mean of raw per-batch utilities
    m: int = 0
    total: float = 0.0

    def update(self, score: float):
        self.total += score
        self.m += 1
        self.mean = self.total / self.m


def make_batches(
    tables: dict[str, LakeTable], batch_count: int, seed: int
) -> list[Batch]:
    """Shuffle each table's rows deterministically and cut them into
    near-equal contiguous slices; batch b collects slice b of every table."""
    slices: dict[str, list[np.ndarray]] = {}
    for i, tid in enumerate(sorted(tables)):
        rng = np.random.default_rng([seed, i])
        perm = rng.permutation(tables[tid].row_count)
        slices[tid] = np.array_split(perm, batch_count)
    return [
        Batch(batch_index=b, rows={tid: slices[tid][b] for tid in slices})
        for b in range(batch_count)
    ]


def hs_epsilon(m: int, n_total: int, delta: float, raw: bool = False) -> float:
    """Interval half-width for a running mean of m of n_total values in
    [0, 1], drawn without replacement.

    For m <= 2 the log-log term is non-positive, so the bound is undefined;
    the default path returns +inf there (no pruning allowed). ``raw=True``
    evaluates the formula directly for m >= 2.
    """
    if m > n_total:
        raise DomainError(f"consumed {m} of {n_total} batches")
    if m < 1 or not 0 < delta < 1:
        raise DomainError("need m >= 1 and 0 < delta < 1")
    if m <= 2 and not raw:
        return math.inf
    if m < 2:
        return math.inf
    radicand = (
        (1.0 - (m - 1) / n_total)
        * (2.0 * math.log(math.log(m)) + math.log(math.pi**2 / (3.0 * delta)))
        / (2.0 * m)
    )
    if radicand < 0:
        return math.inf
    return math.sqrt(radicand)


def candidate_generation(
    plans: list[VisualizationPlan],
    tables: dict[str, LakeTable],
    batches: list[Batch],
    n_prime: int,
    config: EngineConfig | None = None,
    cache: AggregateCache | None = None,
    work: dict | None = None,
    scorer=None,
) -> list[tuple[VisualizationPlan, float]]:
    """Batched search over one query column's plans, returning at most
    n_prime candidates with their estimated scores.

    After each batch the pruning threshold is the lower bound of the
    current n_prime-th best estimate, so every survivor is compared
    against the freshest top candidates. ``scorer`` may supply vectorized
    per-batch utilities (see fastpath.BatchScorer); otherwise each plan is
    aggregated individually. ``work``, when given, accumulates counters:
    plan-batch evaluations, prune events and batches consumed."""
    cfg = config or EngineConfig()
    cache = cache if cache is not None else AggregateCache()
    if work is not None:
        work.setdefault("evaluations", 0)
        work.setdefault("pruned", 0)
        work.setdefault("batches", 0)
    if len(plans) <= n_prime:
        return [(p, 0.0) for p in plans]

    alive = np.arange(len(plans))
    totals = np.zeros(len(plans))
    inv_scale = np.array([1.0 / max(len(p.domain) - 1, 1) for p in plans])
    n_batches = len(batches)
    m = 0

    for batch in batches:
        if work is not None:
            work["batches"] += 1
            work["evaluations"] += len(alive)
        if scorer is not None:
            scores = scorer.batch_scores(plans, batch.batch_index, subset=alive)
        else:
            scores = np.array(
                [
                    utility(
                        group_aggregate(
                            plans[i],
                            tables,
                            scope=batch.rows,
                            scope_key=f"batch{batch.batch_index}",
                            cache=cache,
                        )
                    )
                    for i in alive
                ]
            )
        totals[alive] += scores
        m += 1
        # every survivor has consumed the same number of batches
        eps = hs_epsilon(m, n_batches, cfg.delta)
        if math.isfinite(eps):
            scaled = totals[alive] * inv_scale[alive] / m
            l_overall = np.partition(scaled, -n_prime)[-n_prime] - eps
            keep = scaled + eps >= l_overall
            if not keep.all():
                if work is not None:
                    work["pruned"] += int((~keep).sum())
                alive = alive[keep]
        if len(alive) == n_prime:
            break

    means = totals[alive] / max(m, 1)
    order = sorted(range(len(alive)), key=lambda i: (-means[i], plans[alive[i]].plan_id))
    return [(plans[alive[i]], float(means[i])) for i in order[:n_prime]]


def final_rank(
    candidates: list[VisualizationPlan],
    tables: dict[str, LakeTable],
    n: int,
    cache: AggregateCache | None = None,
) -> list[tuple[VisualizationPlan, float, PlanTable]]:
    """Exact full-data utility for every candidate; descending score with
    ascending plan_id as the tie-break."""
    cache = cache if cache is not None else AggregateCache()
    scored = []
    for plan in candidates:
        pt = group_aggregate(plan, tables, scope=None, scope_key="full", cache=cache)
        scored.append((plan, utility(pt), pt))
    scored.sort(key=lambda t: (-t[1], t[0].plan_id))
    return scored[:n]
