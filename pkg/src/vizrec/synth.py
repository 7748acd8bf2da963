"""Seeded synthetic data lakes for benchmarks and tests.

Three generators: ``generate_lake`` makes small generic lakes with two
hidden table groups per column, ``pruning_lake`` makes a large lake whose
plan utilities split into a dominant tier and a flat tier (so confidence
bounds actually prune), and ``demo_lake`` builds the city salary/tuition
example with exact per-city group means.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .tables import (
    CATEGORICAL,
    NUMERICAL,
    AlignmentMap,
    LakeTable,
    TypedColumn,
)

REGIONS = ["east", "north", "northwest", "south", "southeast", "southwest", "west"]

CITIES = ["Austin", "Boston", "Chicago", "Denver", "El Paso", "Fresno"]
PAY_MEANS = [60009.24, 56940.46, 52323.85, 60146.35, 55112.33, 56197.89]
TUITION_MEANS = [79794.62, 30446.72, 39829.39, 62852.72, 69914.3, 40512.97]


@dataclass
class Lake:
    query: LakeTable
    results: dict[str, LakeTable]
    alignment: AlignmentMap


def _numeric_column(table_id: str, idx: int, header: str, values: np.ndarray) -> TypedColumn:
    return TypedColumn(
        column_id=f"{table_id}:{idx}", header=header, dtype=NUMERICAL,
        values=np.asarray(values, dtype=float),
    )


def _categorical_column(table_id: str, idx: int, header: str, values: list) -> TypedColumn:
    return TypedColumn(column_id=f"{table_id}:{idx}", header=header, dtype=CATEGORICAL, values=values)


def _table(table_id: str, columns: list[TypedColumn]) -> LakeTable:
    rows = len(columns[0].values)
    return LakeTable(table_id=table_id, name=table_id, columns=columns, row_count=rows)


def _centered_noise(rng: np.random.Generator, sigma: float, n: int) -> np.ndarray:
    noise = rng.normal(0.0, sigma, n)
    return noise - noise.mean()


def generate_lake(
    num_tables: int = 4,
    rows: int = 200,
    num_columns: int = 4,
    seed: int = 0,
    null_rate: float = 0.02,
) -> Lake:
    """Small random lake: one categorical column plus numeric columns.

    Result tables fall into two hidden groups with shifted-but-overlapping
    value distributions, so syntactic overlap merges series that a
    distribution test keeps apart.
    """
    rng = np.random.default_rng(seed)
    num_columns = max(2, num_columns)

    cat_probs = {
        0: np.array([3.0, 1.0, 1.0, 2.0, 1.0, 1.0, 3.0]),
        1: np.array([1.0, 3.0, 2.0, 1.0, 3.0, 1.0, 1.0]),
    }
    for g in cat_probs:
        cat_probs[g] = cat_probs[g] / cat_probs[g].sum()
    mus = 40.0 + 10.0 * np.arange(num_columns)
    sigma = 12.0
    shift = 12.0

    def build(table_id: str, group: int, n: int) -> LakeTable:
        cols = []
        cat = rng.choice(REGIONS, size=n, p=cat_probs[group])
        cat = [None if rng.random() < null_rate else str(v) for v in cat]
        cols.append(_categorical_column(table_id, 0, "region", cat))
        for j in range(1, num_columns):
            vals = rng.normal(mus[j] + shift * group, sigma, n)
            if null_rate > 0:
                vals[rng.random(n) < null_rate] = np.nan
            cols.append(_numeric_column(table_id, j, f"m{j}", vals))
        return _table(table_id, cols)

    query = build("query", 0, rows)
    results = {}
    for t in range(num_tables):
        tid = f"t{t:02d}"
        n = max(4, int(rows * rng.uniform(0.8, 1.1)))
        results[tid] = build(tid, t % 2, n)

    entries = {
        q: [(tid, q) for tid in sorted(results)] for q in range(num_columns)
    }
    return Lake(query=query, results=results, alignment=AlignmentMap(entries=entries))


def pruning_lake(
    num_tables: int = 20,
    rows: int = 50_000,
    classes: int = 10,
    per_class: int = 5,
    seed: int = 0,
    fraction: float = 1.0,
    flat_columns: int | None = None,
) -> Lake:
    """Large lake with a two-tier utility structure.

    Query columns come in classes; class k aligns into one low-valued table
    and one high-valued table of the pair (2k, 2k+1). Plans whose dimension
    and measure share a class separate those two tables to opposite ends of
    the domain (high utility); cross-class plans see near-uniform vectors
    (near-zero utility), so interval pruning can discard them early.

    ``flat_columns`` constant-valued columns ride along as measure-only
    ballast: their single-value range disqualifies them as dimensions and
    their single series scores zero, so pruning drops them after a few
    batches while an exhaustive pass still aggregates all their rows.
    """
    rng = np.random.default_rng(seed)
    rows = max(10, int(rows * fraction))
    num_cols = classes * per_class
    if flat_columns is None:
        flat_columns = 2 * num_cols
    # values live far from zero so per-bin MIN/MAX of the uniform query
    # columns normalize to near-constant vectors
    base = 1000.0
    lo_mu, hi_mu, span = base + 10.0, base + 150.0, 160.0

    q_cols = [
        _numeric_column("query", i, f"c{i:02d}", rng.uniform(base, base + span, rows))
        for i in range(num_cols)
    ]
    q_cols += [
        _numeric_column("query", num_cols + i, f"z{i:02d}", np.full(rows, base + i))
        for i in range(flat_columns)
    ]
    query = _table("query", q_cols)

    results: dict[str, LakeTable] = {}
    entries: dict[int, list[tuple[str, int]]] = {i: [] for i in range(num_cols)}
    for t in range(num_tables):
        tid = f"t{t:02d}"
        klass = t // 2
        mu = lo_mu if t % 2 == 0 else hi_mu
        cols = []
        if klass < classes:
            for pos in range(per_class):
                q_index = klass * per_class + pos
                header = f"c{q_index:02d}"
                cols.append(
                    _numeric_column(tid, pos, header, rng.normal(mu, 1.0, rows))
                )
                entries[q_index].append((tid, pos))
        else:
            cols.append(_numeric_column(tid, 0, "filler", rng.uniform(base, base + span, rows)))
        results[tid] = _table(tid, cols)
    return Lake(query=query, results=results, alignment=AlignmentMap(entries=entries))


def demo_lake(seed: int = 7, sigma_pay: float = 6000.0, sigma_tuition: float = 20000.0) -> Lake:
    """City pay/tuition lake whose per-city group means are exact.

    Built so the pay-family columns chain-merge under the distribution test
    (each table's global mean and variance match the running merged fit)
    while the tuition columns stay a separate series, and the plan
    ⟨City, Salary, AVG⟩ reproduces the known two-series vectors.
    """
    rng = np.random.default_rng(seed)
    t_bar = float(np.mean(PAY_MEANS))

    # pay series = salary(30/city) + pay(30/city) + total_comp(50/city);
    # solve per-city means so the blended mean hits PAY_MEANS exactly and
    # total_comp's global (mean, var) is twice salary's, matching the
    # sum-of-independents merge rule.
    m_c = np.array(PAY_MEANS) - 0.3125 * t_bar          # salary / pay per-city mean
    t_c = 2.2 * np.array(PAY_MEANS) - 1.2 * m_c         # total_comp per-city mean
    var_city = float(np.var(m_c))
    sigma_total = float(np.sqrt(var_city + 2.0 * sigma_pay**2))

    def city_column(table_id: str, per_city: int) -> TypedColumn:
        vals = [c for c in CITIES for _ in range(per_city)]
        return _categorical_column(table_id, 0, "City", vals)

    def measure_column(table_id: str, header: str, means, per_city: int, sigma: float) -> TypedColumn:
        chunks = [mu + _centered_noise(rng, sigma, per_city) for mu in means]
        return _numeric_column(table_id, 1, header, np.concatenate(chunks))

    query = _table("pay_1", [city_column("pay_1", 30), measure_column("pay_1", "Salary", m_c, 30, sigma_pay)])
    results = {
        "pay_2": _table("pay_2", [city_column("pay_2", 30), measure_column("pay_2", "Pay", m_c, 30, sigma_pay)]),
        "pay_3": _table("pay_3", [city_column("pay_3", 50), measure_column("pay_3", "Total_comp", t_c, 50, sigma_total)]),
        "tuition_1": _table("tuition_1", [city_column("tuition_1", 60), measure_column("tuition_1", "Tuition", TUITION_MEANS, 60, sigma_tuition)]),
        "tuition_2": _table("tuition_2", [city_column("tuition_2", 60), measure_column("tuition_2", "Tuition", TUITION_MEANS, 60, sigma_tuition)]),
    }
    entries = {
        0: [(tid, 0) for tid in sorted(results)],
        1: [(tid, 1) for tid in sorted(results)],
    }
    return Lake(query=query, results=results, alignment=AlignmentMap(entries=entries))


def alignment_document(lake: Lake) -> dict:
    return {
        "query_table": lake.query.table_id,
        "alignments": [
            {
                "query_column": lake.query.columns[q].header,
                "matches": [
                    {"table": tid, "column": c_idx} for tid, c_idx in pairs
                ],
            }
            for q, pairs in sorted(lake.alignment.entries.items())
        ],
    }


def write_lake(lake: Lake, directory) -> dict:
    """Write query/result CSVs and the alignment JSON; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    results_dir = directory / "results"
    results_dir.mkdir(exist_ok=True)

    def dump(table: LakeTable, path: Path):
        with open(path, "w", newline="", encoding="utf-8") as f:
            csv.writer(f).writerows(table.to_rows())

    query_path = directory / f"{lake.query.table_id}.csv"
    dump(lake.query, query_path)
    result_paths = {}
    for tid, table in lake.results.items():
        result_paths[tid] = results_dir / f"{tid}.csv"
        dump(table, result_paths[tid])
    alignment_path = directory / "alignment.json"
    with open(alignment_path, "w", encoding="utf-8") as f:
        json.dump(alignment_document(lake), f, indent=2)
    return {"query": query_path, "results": result_paths, "alignment": alignment_path}
