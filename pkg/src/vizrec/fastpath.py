"""Vectorized per-batch plan scoring for candidate generation.

Scoring one plan on one batch through the generic per-plan aggregation path
costs far more in interpreter overhead than in row work once batches are
small. This module evaluates every surviving plan of one dimension column
on one batch with a fixed number of array operations: per table, all
measure columns are aggregated at once (matmul for sums, sort + reduceat
for extremes), member vectors are scatter-added into per-series rows, and
normalization plus pairwise EMD run on stacked tensors.

Scores agree with group_aggregate + utility up to floating-point
reassociation (property-tested); the slow path remains the reference.
"""

from __future__ import annotations

import numpy as np

from .plans import VisualizationPlan
from .prune import Batch
from .tables import LakeTable

_FUNCS = ("COUNT", "SUM", "AVG", "MIN", "MAX")


class _TableView:
    """One table's dimension codes and measure values, re-ordered so every
    batch is a contiguous slice."""

    def __init__(self, order: np.ndarray, offsets: np.ndarray):
        self.order = order
        self.offsets = offsets
        self.codes: dict[int, np.ndarray] = {}       # a_index -> permuted codes
        # (n_measures, rows) permuted value matrices with nulls pre-replaced
        # by the identity of the consuming aggregate
        self.val_zero: np.ndarray | None = None      # nan -> 0 (SUM)
        self.val_pos: np.ndarray | None = None       # nan -> +inf (MIN)
        self.val_neg: np.ndarray | None = None       # nan -> -inf (MAX)
        self.value_row: dict[str, int] = {}           # column_id -> matrix row

    def batch_slice(self, b: int) -> slice:
        return slice(int(self.offsets[b]), int(self.offsets[b + 1]))


class _DimensionSetup:
    """Per-dimension scatter maps: which (table, measure) rows feed which
    series row, and which series rows make up each plan."""

    def __init__(self):
        self.d = 0
        self.n_series = 0
        # per table: (value-matrix rows, target series rows, rows-unique flag)
        self.tid_groups: list[tuple[str, np.ndarray, np.ndarray, bool]] = []
        # per measure index: (first series row, series count)
        self.series_span: dict[int, tuple[int, int]] = {}
        # aligned with the plan list given at setup time
        self.func_arr: np.ndarray | None = None
        self.first_arr: np.ndarray | None = None
        self.v_arr: np.ndarray | None = None


def _per_batch_scores_reference(plans, tables, batch, cache):
    from .plans import group_aggregate
    from .utility import utility

    out = np.empty(len(plans))
    for i, plan in enumerate(plans):
        pt = group_aggregate(
            plan, tables, scope=batch.rows, scope_key=f"batch{batch.batch_index}", cache=cache
        )
        out[i] = utility(pt)
    return out


class BatchScorer:
    """Scores (plan, batch) pairs for plans sharing one dimension column."""

    def __init__(self, tables: dict[str, LakeTable], batches: list[Batch]):
        self.tables = tables
        self.batches = batches
        self._views: dict[str, _TableView] = {}
        self._setups: dict[int, _DimensionSetup] = {}
        self._batch_cache: dict = {}

    # -- one-time layout ------------------------------------------------

    def _view(self, tid: str) -> _TableView:
        view = self._views.get(tid)
        if view is None:
            parts = [b.rows.get(tid, np.empty(0, dtype=np.int64)) for b in self.batches]
            order = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
            offsets = np.zeros(len(parts) + 1, dtype=np.int64)
            np.cumsum([len(p) for p in parts], out=offsets[1:])
            view = _TableView(order, offsets)
            self._views[tid] = view
        return view

    def _ensure_measures(self, plans: list[VisualizationPlan]):
        """Load every referenced measure column into its table's value matrix."""
        needed: dict[str, list] = {}
        seen: set[str] = set()
        for plan in plans:
            for s in plan.series_source.series:
                for tid, col in s.members:
                    view = self._view(tid)
                    if col.column_id not in view.value_row and col.column_id not in seen:
                        seen.add(col.column_id)
                        needed.setdefault(tid, []).append(col)
        for tid, cols in needed.items():
            view = self._view(tid)
            new_rows = [c.numeric_with_nulls()[view.order] for c in cols]
            start = 0 if view.val_zero is None else view.val_zero.shape[0]
            for i, c in enumerate(cols):
                view.value_row[c.column_id] = start + i
            stacked = np.array(new_rows) if new_rows else np.empty((0, len(view.order)))
            finite = np.isfinite(stacked)
            if finite.all():
                zero = pos = neg = stacked  # no nulls: share one matrix
            else:
                zero = np.where(finite, stacked, 0.0)
                pos = np.where(finite, stacked, np.inf)
                neg = np.where(finite, stacked, -np.inf)
            if view.val_zero is None:
                view.val_zero, view.val_pos, view.val_neg = zero, pos, neg
            else:
                view.val_zero = np.vstack([view.val_zero, zero])
                view.val_pos = np.vstack([view.val_pos, pos])
                view.val_neg = np.vstack([view.val_neg, neg])

    def _setup(self, plans: list[VisualizationPlan]) -> _DimensionSetup:
        a_index = plans[0].a_index
        setup = self._setups.get(a_index)
        if setup is not None:
            return setup
        self._ensure_measures(plans)
        assignment = plans[0].assignment
        setup = _DimensionSetup()
        setup.d = len(plans[0].domain)
        by_tid: dict[str, tuple[list[int], list[int]]] = {}
        for plan in plans:
            if plan.m_index not in setup.series_span:
                first = setup.n_series
                series_list = plan.series_source.series
                for s_idx, s in enumerate(series_list):
                    for tid, col in s.members:
                        if tid not in assignment.codes:
                            continue  # no dimension alignment: contributes nothing
                        view = self._view(tid)
                        if a_index not in view.codes:
                            view.codes[a_index] = assignment.codes[tid][view.order]
                        vrows, srows = by_tid.setdefault(tid, ([], []))
                        vrows.append(view.value_row[col.column_id])
                        srows.append(first + s_idx)
                setup.n_series += len(series_list)
                setup.series_span[plan.m_index] = (first, len(series_list))
        setup.func_arr = np.array([_FUNCS.index(p.func) for p in plans])
        setup.first_arr = np.array([setup.series_span[p.m_index][0] for p in plans])
        setup.v_arr = np.array([setup.series_span[p.m_index][1] for p in plans])
        setup.tid_groups = [
            (tid, np.array(vrows), np.array(srows), len(set(srows)) == len(srows))
            for tid, (vrows, srows) in by_tid.items()
        ]
        self._setups[a_index] = setup
        return setup

    # -- per-batch aggregation -------------------------------------------

    def _table_batch_aggregates(self, tid: str, a_index: int, d: int, b: int):
        """(count, sum, min, max) over one table's batch slice; sum/min/max
        are (n_measures, d) matrices covering every loaded measure column."""
        key = (tid, a_index, b)
        hit = self._batch_cache.get(key)
        if hit is not None:
            return hit
        view = self._views[tid]
        sl = view.batch_slice(b)
        codes = view.codes[a_index][sl]
        width = sl.stop - sl.start
        empty = np.empty((0, width))
        v_zero = view.val_zero if view.val_zero is not None else empty
        n_m = v_zero.shape[0]
        if codes.size == 0:
            out = (
                np.zeros(d),
                np.zeros((n_m, d)),
                np.full((n_m, d), np.inf),
                np.full((n_m, d), -np.inf),
            )
            self._batch_cache[key] = out
            return out

        valid = codes >= 0
        counts = np.bincount(codes[valid], minlength=d).astype(float)

        onehot = np.zeros((codes.size, d))
        onehot[np.nonzero(valid)[0], codes[valid]] = 1.0
        sums = v_zero[:, sl] @ onehot

        order = np.argsort(codes, kind="stable")
        sorted_codes = codes[order]
        start = np.searchsorted(sorted_codes, 0)  # skip unassigned rows
        seg_codes = sorted_codes[start:]
        mins = np.full((n_m, d), np.inf)
        maxs = np.full((n_m, d), -np.inf)
        if seg_codes.size and n_m:
            gather = sl.start + order[start:]
            starts = np.searchsorted(seg_codes, np.arange(d))
            in_range = starts < seg_codes.size  # trailing empty bins have no segment
            present = np.zeros(d, dtype=bool)
            present[seg_codes] = True
            # duplicate starts (empty middle bins) yield one-element garbage
            # segments; the presence mask discards them
            lo = np.minimum.reduceat(view.val_pos[:, gather], starts[in_range], axis=1)
            hi = np.maximum.reduceat(view.val_neg[:, gather], starts[in_range], axis=1)
            keep = present[in_range]
            mins[:, in_range & present] = lo[:, keep]
            maxs[:, in_range & present] = hi[:, keep]
        out = (counts, sums, mins, maxs)
        self._batch_cache[key] = out
        return out

    def batch_scores(
        self,
        plans: list[VisualizationPlan],
        batch_index: int,
        subset: np.ndarray | None = None,
    ) -> np.ndarray:
        """Raw utilities on one batch for plans sharing one dimension column.

        ``plans`` must be the same full list on every call for a given
        dimension; ``subset`` selects the scored positions (default all).
        The result is aligned with ``subset``."""
        if not plans:
            return np.empty(0)
        setup = self._setup(plans)
        a_index = plans[0].a_index
        d = setup.d
        n_s = setup.n_series

        # per-series aggregate rows
        s_count = np.zeros((n_s, d))
        s_sum = np.zeros((n_s, d))
        s_min = np.full((n_s, d), np.inf)
        s_max = np.full((n_s, d), -np.inf)
        for tid, vrows, srows, unique in setup.tid_groups:
            counts, sums, mins, maxs = self._table_batch_aggregates(tid, a_index, d, batch_index)
            if unique:
                s_count[srows] += counts
                s_sum[srows] += sums[vrows]
                s_min[srows] = np.minimum(s_min[srows], mins[vrows])
                s_max[srows] = np.maximum(s_max[srows], maxs[vrows])
            else:  # several members of one series live in the same table
                np.add.at(s_count, srows, counts[None, :])
                np.add.at(s_sum, srows, sums[vrows])
                np.minimum.at(s_min, srows, mins[vrows])
                np.maximum.at(s_max, srows, maxs[vrows])

        with np.errstate(invalid="ignore", divide="ignore"):
            s_avg = np.where(s_count > 0, s_sum / s_count, 0.0)
        s_min = np.where(np.isfinite(s_min), s_min, np.nan)
        s_max = np.where(np.isfinite(s_max), s_max, np.nan)
        # all-zero (COUNT/SUM) and all-NaN (MIN/MAX/AVG) rows of an absent
        # series normalize to uniform, exactly like the slow path
        funcs = np.stack([s_count, s_sum, s_avg, s_min, s_max])  # (5, n_series, d)

        if subset is None:
            func_ids, firsts, v_arr = setup.func_arr, setup.first_arr, setup.v_arr
        else:
            func_ids = setup.func_arr[subset]
            firsts = setup.first_arr[subset]
            v_arr = setup.v_arr[subset]
        scores = np.empty(len(func_ids))
        for v in np.unique(v_arr):
            sel = np.nonzero(v_arr == v)[0]
            if v <= 1:
                scores[sel] = 0.0  # single series: no pairs, zero utility
                continue
            rows = firsts[sel, None] + np.arange(v)[None, :]
            stack = funcs[func_ids[sel, None], rows]  # (k, v, d)
            scores[sel] = _utilities(stack)
        return scores


def _utilities(stack: np.ndarray) -> np.ndarray:
    """Eq.-style average pairwise EMD for a (k, v, d) tensor of raw series
    vectors; mirrors utility(normalize(...)) exactly."""
    k, v, d = stack.shape
    if v <= 1:
        return np.zeros(k)
    vecs = np.nan_to_num(stack)
    mn = vecs.min(axis=2, keepdims=True)
    np.subtract(vecs, np.minimum(mn, 0.0), out=vecs)  # shift negative vectors only
    total = vecs.sum(axis=2, keepdims=True)
    positive = total > 0
    np.divide(vecs, total, out=vecs, where=positive)
    if not positive.all():
        vecs[~positive[:, :, 0]] = 1.0 / d  # empty vector: uniform distribution
    cdf = np.cumsum(vecs, axis=2)[:, :, :-1]
    out = np.zeros(k)
    tmp = np.empty((k, d - 1))
    for i in range(v):
        for j in range(i + 1, v):
            np.subtract(cdf[:, i], cdf[:, j], out=tmp)
            np.abs(tmp, out=tmp)
            out += tmp.sum(axis=1)
    return out * (2.0 / (v * (v - 1)))
