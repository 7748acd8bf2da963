"""Series creation: grouping aligned columns into related series.

Three strategies: ``nomerge`` (every column is its own series), ``overlap``
(greedy union-find on syntactic similarity) and ``stats`` (iterative
chi-square merging of adjacent series in ascending-cardinality order; the
pruned search also runs on top of ``stats``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainccinv
from scipy.stats import skew

from .config import EngineConfig
from .errors import DtypeMismatch, EmptyColumn, FamilyMismatch
from .tables import CATEGORICAL, NUMERICAL, TEXTUAL, TypedColumn, tokenize

NORMAL = "normal"
EXPONENTIAL = "exponential"
MULTINOMIAL = "multinomial"


@dataclass
class FittedStats:
    family: str
    params: dict
    sample_size: int
    cardinality: int = 0  # non-null population size behind the fit; weights multinomial merges


@dataclass
class Series:
    series_id: str
    query_column: int
    members: list[tuple[str, TypedColumn]]  # (table_id, column), in merge order
    stats: FittedStats | None = None
    label: str = ""

    def cardinality(self) -> int:
        return sum(len(c.non_null()) for _, c in self.members)

    def non_null_values(self) -> list:
        out = []
        for _, c in self.members:
            out.extend(c.non_null())
        return out

    def numeric_values(self) -> np.ndarray:
        return np.concatenate([c.numeric() for _, c in self.members])


@dataclass
class SeriesCollection:
    query_column: int
    series: list[Series] = field(default_factory=list)


def syntactic_relatedness(c1: TypedColumn, c2: TypedColumn) -> float:
    if c1.dtype != c2.dtype:
        raise DtypeMismatch(f"{c1.dtype} vs {c2.dtype}")
    if c1.dtype == CATEGORICAL:
        s1 = {str(v) for v in c1.non_null()}
        s2 = {str(v) for v in c2.non_null()}
        union = s1 | s2
        return len(s1 & s2) / len(union) if union else 0.0
    if c1.dtype == NUMERICAL:
        a, b = c1.numeric(), c2.numeric()
        if a.size == 0 or b.size == 0:
            return 0.0
        lo = max(a.min(), b.min())
        hi = min(a.max(), b.max())
        union = max(a.max(), b.max()) - min(a.min(), b.min())
        inter = max(0.0, hi - lo)
        return inter / union if union > 0 else 1.0
    # textual: bag-of-words vocabularies
    v1 = set()
    for v in c1.non_null():
        v1.update(tokenize(v))
    v2 = set()
    for v in c2.non_null():
        v2.update(tokenize(v))
    union = v1 | v2
    return len(v1 & v2) / len(union) if union else 0.0


def _sample(values, w: int, rng: np.random.Generator) -> list:
    if len(values) <= w:
        return list(values)
    idx = rng.choice(len(values), size=w, replace=False)
    return [values[i] for i in idx]


def fit_stats(
    col_or_values,
    dtype: str,
    w: int,
    rng: np.random.Generator,
    skew_threshold: float = 1.5,
) -> FittedStats:
    """MLE fit from a without-replacement sample of at most ``w`` cells."""
    if isinstance(col_or_values, TypedColumn):
        values = col_or_values.non_null()
        dtype = col_or_values.dtype
    else:
        values = list(col_or_values)
    if not values:
        raise EmptyColumn("cannot fit statistics on an all-null column")
    sample = _sample(values, w, rng)
    if dtype == NUMERICAL:
        arr = np.array([float(v) for v in sample])
        mu = float(arr.mean())
        var = float(arr.var())
        if arr.size >= 3 and arr.min() >= 0 and mu > 0 and skew(arr) > skew_threshold:
            return FittedStats(EXPONENTIAL, {"rate": 1.0 / mu}, len(sample), len(values))
        return FittedStats(NORMAL, {"mu": mu, "var": var}, len(sample), len(values))
    # categorical / textual: multinomial over sampled frequencies
    counts: dict[str, int] = {}
    for v in sample:
        counts[str(v)] = counts.get(str(v), 0) + 1
    total = len(sample)
    probs = {k: c / total for k, c in counts.items()}
    return FittedStats(MULTINOMIAL, {"probs": probs}, total, len(values))


def chi2_critical(df: int, delta: float) -> float:
    """Upper critical value of the chi-square distribution via the
    regularized upper incomplete gamma function."""
    return float(2.0 * gammainccinv(df / 2.0, delta))


def chi_square_statistic(observed: np.ndarray, expected: np.ndarray) -> float:
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    return float(((observed - expected) ** 2 / expected).sum())


def _numeric_buckets(stats: FittedStats, n_buckets: int) -> np.ndarray | None:
    """Interior boundaries of equi-probable buckets of the fitted distribution."""
    qs = np.arange(1, n_buckets) / n_buckets
    if stats.family == NORMAL:
        var = stats.params["var"]
        if var <= 0:
            return None
        from scipy.stats import norm

        return norm.ppf(qs, loc=stats.params["mu"], scale=np.sqrt(var))
    if stats.family == EXPONENTIAL:
        lam = stats.params["rate"]
        return -np.log1p(-qs) / lam
    return None


def _merge_small_buckets(obs: list[float], exp: list[float], floor: float):
    """Greedily merge adjacent-by-size buckets until every expected count
    reaches the floor; returns None when fewer than two buckets survive."""
    pairs = sorted(zip(exp, obs))
    merged: list[list[float]] = []
    for e, o in pairs:
        if merged and merged[-1][0] < floor:
            merged[-1][0] += e
            merged[-1][1] += o
        else:
            merged.append([e, o])
    if len(merged) > 1 and merged[-1][0] < floor:
        merged[-2][0] += merged[-1][0]
        merged[-2][1] += merged[-1][1]
        merged.pop()
    if len(merged) < 2 or any(e < floor for e, _ in merged):
        return None
    exp_arr = np.array([e for e, _ in merged])
    obs_arr = np.array([o for _, o in merged])
    return obs_arr, exp_arr


def chi_square_test(
    observed_values,
    expected: FittedStats,
    w: int,
    delta: float,
    rng: np.random.Generator,
    config: EngineConfig | None = None,
) -> tuple[float, bool]:
    """Goodness-of-fit test of a sample of observed cells against a fitted
    expected distribution. Degenerate bucketings fail closed (pass=False)."""
    cfg = config or EngineConfig()
    sample = _sample(list(observed_values), w, rng)
    w_obs = len(sample)
    if w_obs < 2:
        return float("inf"), False

    if expected.family in (NORMAL, EXPONENTIAL):
        n_buckets = min(cfg.chi2_buckets, int(w_obs // cfg.min_expected))
        if n_buckets < 2:
            return float("inf"), False
        bounds = _numeric_buckets(expected, n_buckets)
        if bounds is None:
            return float("inf"), False
        arr = np.array([float(v) for v in sample])
        obs = np.bincount(np.searchsorted(bounds, arr), minlength=n_buckets).astype(float)
        exp = np.full(n_buckets, w_obs / n_buckets)
    else:
        probs = expected.params["probs"]
        cats = sorted(set(probs) | {str(v) for v in sample})
        obs_counts = {c: 0.0 for c in cats}
        for v in sample:
            obs_counts[str(v)] += 1
        exp_list = [probs.get(c, 0.0) * w_obs for c in cats]
        obs_list = [obs_counts[c] for c in cats]
        merged = _merge_small_buckets(obs_list, exp_list, cfg.min_expected)
        if merged is None:
            return float("inf"), False
        obs, exp = merged

    stat = chi_square_statistic(obs, exp)
    # the expected distribution was itself estimated from a finite sample;
    # deflate the statistic as in a two-sample comparison so estimation noise
    # on that side does not count as disagreement
    if expected.sample_size > 0:
        stat /= 1.0 + w_obs / expected.sample_size
    df = len(obs) - 1
    return stat, stat < chi2_critical(df, delta)


def merge_stats(s1: FittedStats, s2: FittedStats) -> FittedStats:
    if s1.family != s2.family:
        raise FamilyMismatch(f"{s1.family} vs {s2.family}")
    card = s1.cardinality + s2.cardinality
    size = s1.sample_size + s2.sample_size
    if s1.family == NORMAL:
        return FittedStats(
            NORMAL,
            {"mu": s1.params["mu"] + s2.params["mu"], "var": s1.params["var"] + s2.params["var"]},
            size,
            card,
        )
    if s1.family == EXPONENTIAL:
        lam = 2.0 / (1.0 / s1.params["rate"] + 1.0 / s2.params["rate"])
        return FittedStats(EXPONENTIAL, {"rate": lam}, size, card)
    w1 = s1.cardinality or 1
    w2 = s2.cardinality or 1
    probs: dict[str, float] = {}
    for k in set(s1.params["probs"]) | set(s2.params["probs"]):
        probs[k] = (w1 * s1.params["probs"].get(k, 0.0) + w2 * s2.params["probs"].get(k, 0.0)) / (
            w1 + w2
        )
    return FittedStats(MULTINOMIAL, {"probs": probs}, size, card)


def _series_label(members) -> str:
    headers = []
    for _, col in members:
        h = col.header or col.column_id
        if h not in headers:
            headers.append(h)
    return "+".join(headers[:3]) + ("..." if len(headers) > 3 else "")


def _singletons(q_index: int, columns: list[tuple[str, TypedColumn]]) -> list[Series]:
    ordered = sorted(
        columns, key=lambda tc: (len(tc[1].non_null()), tc[0], tc[1].column_id)
    )
    return [
        Series(
            series_id=f"q{q_index}-s{i}",
            query_column=q_index,
            members=[tc],
            label=_series_label([tc]),
        )
        for i, tc in enumerate(ordered)
    ]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def create_series(
    q_index: int,
    columns: list[tuple[str, TypedColumn]],
    strategy: str,
    config: EngineConfig | None = None,
) -> SeriesCollection:
    """Build the series collection for one query column.

    ``columns`` holds (table_id, column) pairs: the query column itself plus
    its aligned result columns.
    """
    cfg = config or EngineConfig()
    series = _singletons(q_index, columns)
    strategy = strategy.lower()

    if strategy == "nomerge" or len(series) <= 1:
        return SeriesCollection(query_column=q_index, series=series)

    if strategy == "overlap":
        uf = _UnionFind(len(series))
        for i in range(len(series)):
            for j in range(i + 1, len(series)):
                score = syntactic_relatedness(series[i].members[0][1], series[j].members[0][1])
                if score >= cfg.overlap_threshold:
                    uf.union(i, j)
        groups: dict[int, list[Series]] = {}
        for i, s in enumerate(series):
            groups.setdefault(uf.find(i), []).append(s)
        merged = []
        for gi, root in enumerate(sorted(groups)):
            members = [m for s in groups[root] for m in s.members]
            merged.append(
                Series(
                    series_id=f"q{q_index}-s{gi}",
                    query_column=q_index,
                    members=members,
                    label=_series_label(members),
                )
            )
        return SeriesCollection(query_column=q_index, series=merged)

    if strategy != "stats":
        raise ValueError(f"unknown series strategy {strategy!r}")

    rng = np.random.default_rng([cfg.seed, q_index])
    dtype = columns[0][1].dtype
    for s in series:
        s.stats = fit_stats(s.non_null_values(), dtype, cfg.W, rng, cfg.skew_threshold)

    # iterative adjacent merging: test (j, j+1); on pass merge and restart
    j = 0
    while len(series) > 2 and j < len(series) - 1:
        a, b = series[j], series[j + 1]
        observed, expected = (a, b) if a.cardinality() <= b.cardinality() else (b, a)
        try:
            if a.stats.family != b.stats.family:
                raise FamilyMismatch(a.stats.family)
            _, passed = chi_square_test(
                observed.non_null_values(), expected.stats, cfg.W, cfg.delta, rng, cfg
            )
        except FamilyMismatch:
            passed = False
        if passed:
            members = a.members + b.members
            merged = Series(
                series_id=a.series_id,
                query_column=q_index,
                members=members,
                stats=merge_stats(a.stats, b.stats),
                label=_series_label(members),
            )
            series[j : j + 2] = [merged]
            j = 0
        else:
            j += 1

    for i, s in enumerate(series):
        s.series_id = f"q{q_index}-s{i}"
    return SeriesCollection(query_column=q_index, series=series)


def series_runtime_bound(u: int, k_values: list[int], w: int, rows: int = 400, seed: int = 0):
    """Measure stats-strategy series creation time as the number of result
    tables grows; used by the scaling checks."""
    import time

    from .synth import generate_lake

    timings = []
    for k in k_values:
        lake = generate_lake(num_tables=k, rows=rows, num_columns=u, seed=seed)
        cfg = EngineConfig(W=w, seed=seed)
        start = time.perf_counter()
        for q_index in range(u):
            cols = [(lake.query.table_id, lake.query.columns[q_index])]
            for tid, c_idx in lake.alignment.aligned(q_index):
                cols.append((tid, lake.results[tid].columns[c_idx]))
            create_series(q_index, cols, "stats", cfg)
        timings.append(time.perf_counter() - start)
    return timings
