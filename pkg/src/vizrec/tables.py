"""Table loading, type inference and column alignment.

Tables are immutable after load. Cells are kept as the raw strings from the
file (or None for nulls) so that serialization round-trips exactly; numeric
views are derived lazily.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import EngineConfig
from .errors import (
    DuplicateAlignment,
    EmptyColumn,
    IoError,
    ParseError,
    SchemaError,
)

NULL_TOKENS = {"", "na", "n/a", "null"}

CATEGORICAL = "categorical"
NUMERICAL = "numerical"
TEXTUAL = "textual"

_TOKEN_RE = re.compile(r"[^0-9a-z]+")


def is_null(cell) -> bool:
    return cell is None or str(cell).strip().lower() in NULL_TOKENS


def _to_float(cell: str):
    try:
        v = float(cell)
    except (TypeError, ValueError):
        return None
    return v if math.isfinite(v) else None


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN_RE.split(str(text).lower()) if t]


@dataclass
class TypedColumn:
    column_id: str
    header: str
    dtype: str
    values: list | np.ndarray  # raw cells; None (or NaN in float arrays) marks a null

    _numeric: np.ndarray | None = field(default=None, repr=False, compare=False)
    _numeric_rows: np.ndarray | None = field(default=None, repr=False, compare=False)

    def non_null(self) -> list:
        if isinstance(self.values, np.ndarray):
            return list(self.values[np.isfinite(self.values)])
        return [v for v in self.values if v is not None]

    def numeric(self) -> np.ndarray:
        """Non-null cells parsed as floats (only meaningful for numerical columns)."""
        if self._numeric is None:
            arr = self.numeric_with_nulls()
            self._numeric = arr[np.isfinite(arr)]
        return self._numeric

    def numeric_with_nulls(self) -> np.ndarray:
        """Float view aligned to row indices; nulls and unparsable cells are NaN."""
        if self._numeric_rows is None:
            if isinstance(self.values, np.ndarray):
                self._numeric_rows = self.values.astype(float)
            else:
                out = np.full(len(self.values), np.nan)
                for i, v in enumerate(self.values):
                    if v is not None:
                        f = _to_float(v)
                        if f is not None:
                            out[i] = f
                self._numeric_rows = out
        return self._numeric_rows


@dataclass
class LakeTable:
    table_id: str
    name: str
    columns: list[TypedColumn]
    row_count: int

    def column_index(self, ref) -> int:
        """Resolve a header name or integer index to a column position."""
        if isinstance(ref, int) or (isinstance(ref, str) and ref.isdigit()):
            idx = int(ref)
            if 0 <= idx < len(self.columns):
                return idx
            raise SchemaError(f"column index {ref} out of range in table {self.table_id}")
        for i, c in enumerate(self.columns):
            if c.header == ref:
                return i
        raise SchemaError(f"no column {ref!r} in table {self.table_id}")

    def to_rows(self) -> list[list[str]]:
        """Header row plus data rows with the original cell text ('' for nulls)."""

        def cell(c: TypedColumn, r: int) -> str:
            v = c.values[r]
            if v is None or (isinstance(v, float) and math.isnan(v)):
                return ""
            return str(v)

        rows = [[c.header for c in self.columns]]
        for r in range(self.row_count):
            rows.append([cell(c, r) for c in self.columns])
        return rows


def infer_dtype(values: list, config: EngineConfig | None = None) -> str:
    """Classify a column as numerical, textual or categorical.

    Pure function of the multiset of values: numerical when at least
    ``numeric_ratio`` of non-null cells parse to finite reals, textual when
    the values are mostly-distinct long strings, categorical otherwise.
    """
    cfg = config or EngineConfig()
    non_null = [v for v in values if not is_null(v)]
    if not non_null:
        raise EmptyColumn("all cells are null")
    numeric = sum(1 for v in non_null if _to_float(v) is not None)
    if numeric / len(non_null) >= cfg.numeric_ratio:
        return NUMERICAL
    distinct_ratio = len({str(v) for v in non_null}) / len(non_null)
    mean_tokens = sum(len(tokenize(v)) for v in non_null) / len(non_null)
    if distinct_ratio > cfg.textual_distinct_ratio and mean_tokens > cfg.textual_min_tokens:
        return TEXTUAL
    return CATEGORICAL


def table_from_rows(
    rows: list[list[str]],
    table_id: str,
    name: str = "",
    config: EngineConfig | None = None,
) -> LakeTable:
    """Build a typed table from header + data rows (all cells as strings)."""
    if not rows:
        raise ParseError(f"table {table_id} is empty")
    header, data = rows[0], rows[1:]
    width = len(header)
    for i, row in enumerate(data):
        if len(row) != width:
            raise ParseError(f"ragged row {i + 1} in table {table_id}: {len(row)} != {width}")
    columns = []
    for j, h in enumerate(header):
        raw = [row[j] for row in data]
        cells = [None if is_null(v) else v for v in raw]
        try:
            dtype = infer_dtype(cells, config)
        except EmptyColumn:
            dtype = CATEGORICAL  # column of pure nulls: keep it loadable, unusable downstream
        columns.append(TypedColumn(column_id=f"{table_id}:{j}", header=h, dtype=dtype, values=cells))
    return LakeTable(table_id=table_id, name=name or table_id, columns=columns, row_count=len(data))


def load_table(
    path,
    delimiter: str = ",",
    header: bool = True,
    table_id: str | None = None,
    config: EngineConfig | None = None,
) -> LakeTable:
    path = Path(path)
    tid = table_id or path.stem
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f, delimiter=delimiter))
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    if not rows:
        raise ParseError(f"{path} is empty")
    if not header:
        rows = [[str(j) for j in range(len(rows[0]))]] + rows
    return table_from_rows(rows, table_id=tid, name=path.stem, config=config)


@dataclass
class AlignmentMap:
    """For each query column index, the (table_id, column index) pairs aligned to it."""

    entries: dict[int, list[tuple[str, int]]]
    dropped: list[dict] = field(default_factory=list)  # mixed-dtype pairs removed at load

    def aligned(self, q_index: int) -> list[tuple[str, int]]:
        return self.entries.get(q_index, [])


def _validate_and_filter(
    raw: dict[int, list[tuple[str, int]]],
    query: LakeTable,
    results: dict[str, LakeTable],
) -> AlignmentMap:
    entries: dict[int, list[tuple[str, int]]] = {}
    dropped: list[dict] = []
    for q_idx, pairs in raw.items():
        seen_tables = set()
        kept = []
        q_dtype = query.columns[q_idx].dtype
        for tid, c_idx in pairs:
            if tid in seen_tables:
                raise DuplicateAlignment(
                    f"query column {q_idx} aligned twice to table {tid}"
                )
            seen_tables.add(tid)
            col = results[tid].columns[c_idx]
            if col.dtype != q_dtype:
                dropped.append(
                    {
                        "query_column": query.columns[q_idx].header,
                        "table": tid,
                        "column": col.header,
                        "reason": f"dtype {col.dtype} != {q_dtype}",
                    }
                )
                continue
            kept.append((tid, c_idx))
        if kept:
            entries[q_idx] = kept
    return AlignmentMap(entries=entries, dropped=dropped)


def load_alignment(path, query: LakeTable, results: dict[str, LakeTable]) -> AlignmentMap:
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"bad alignment JSON in {path}: {e}") from e

    if doc.get("query_table") not in (None, query.table_id):
        raise SchemaError(
            f"alignment file is for table {doc.get('query_table')!r}, not {query.table_id!r}"
        )
    raw: dict[int, list[tuple[str, int]]] = {}
    for entry in doc.get("alignments", []):
        q_idx = query.column_index(entry["query_column"])
        pairs = raw.setdefault(q_idx, [])
        for m in entry.get("matches", []):
            tid = m["table"]
            if tid not in results:
                raise SchemaError(f"unknown result table {tid!r}")
            c_idx = results[tid].column_index(m["column"])
            pairs.append((tid, c_idx))
    return _validate_and_filter(raw, query, results)


def _value_sample(col: TypedColumn, k: int, rng: np.random.Generator) -> set:
    vals = [str(v) for v in col.values if v is not None]
    if len(vals) <= k:
        return set(vals)
    idx = rng.choice(len(vals), size=k, replace=False)
    return {vals[i] for i in idx}


def baseline_align(
    query: LakeTable,
    results: dict[str, LakeTable],
    config: EngineConfig | None = None,
) -> AlignmentMap:
    """Header/value-overlap fallback aligner for when no discovery engine
    output is available. Deliberately simple; not part of the recommendation
    algorithm itself."""
    cfg = config or EngineConfig()
    raw: dict[int, list[tuple[str, int]]] = {}
    for q_idx, qcol in enumerate(query.columns):
        q_tokens = set(tokenize(qcol.header))
        rng = np.random.default_rng(cfg.seed)
        q_sample = _value_sample(qcol, cfg.align_sample, rng)
        for tid in sorted(results):
            best = None
            for c_idx, col in enumerate(results[tid].columns):
                c_tokens = set(tokenize(col.header))
                h_union = q_tokens | c_tokens
                h_score = len(q_tokens & c_tokens) / len(h_union) if h_union else 0.0
                rng_c = np.random.default_rng(cfg.seed)
                c_sample = _value_sample(col, cfg.align_sample, rng_c)
                v_union = q_sample | c_sample
                v_score = len(q_sample & c_sample) / len(v_union) if v_union else 0.0
                score = 0.5 * h_score + 0.5 * v_score
                if score >= cfg.align_threshold and (best is None or score > best[0]):
                    best = (score, c_idx)
            if best is not None:
                raw.setdefault(q_idx, []).append((tid, best[1]))
    return _validate_and_filter(raw, query, results)
