"""Discretization of dimension columns into ordered finite domains.

Categorical columns pass through as sorted distinct tokens, numerical
columns get equi-width bins over the global range of all source columns,
and textual columns are clustered over hashed bag-of-token vectors.
"""

from __future__ import annotations

import math
import zlib
from collections import Counter
from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from .config import EngineConfig
from .errors import EmptyDomain
from .tables import CATEGORICAL, NUMERICAL, TEXTUAL, TypedColumn, tokenize


@dataclass
class DimensionDomain:
    values: list[str]   # human-readable descriptor per domain value, in canonical order
    dtype: str

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class CellAssignment:
    """Per-table array of domain indices aligned to row index; -1 for nulls."""

    codes: dict[str, np.ndarray]

    def code(self, table_id: str, row: int) -> int:
        return int(self.codes[table_id][row])


def embed_text(cell: str, dim: int) -> np.ndarray:
    """Signed feature-hash embedding of a text cell, L2-normalized.

    Bag-of-tokens: token order does not affect the result. CRC32 keeps the
    hashing stable across processes (unlike the salted builtin hash).
    """
    vec = np.zeros(dim)
    for tok in tokenize(cell):
        b = tok.encode("utf-8")
        bucket = zlib.crc32(b) % dim
        sign = 1.0 if zlib.crc32(b + b"#") % 2 == 0 else -1.0
        vec[bucket] += sign
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def _build_categorical(columns):
    tokens = set()
    for _, col in columns:
        tokens.update(str(v) for v in col.values if v is not None)
    if not tokens:
        raise EmptyDomain("no non-null cells in dimension columns")
    ordered = sorted(tokens)
    index = {t: i for i, t in enumerate(ordered)}
    codes = {}
    for tid, col in columns:
        codes[tid] = np.array(
            [index[str(v)] if v is not None else -1 for v in col.values], dtype=np.int64
        )
    return DimensionDomain(values=ordered, dtype=CATEGORICAL), CellAssignment(codes)


def _build_numerical(columns, bin_count):
    lo = math.inf
    hi = -math.inf
    per_table = {}
    for tid, col in columns:
        arr = col.numeric_with_nulls()
        per_table[tid] = arr
        finite = arr[np.isfinite(arr)]
        if finite.size:
            lo = min(lo, float(finite.min()))
            hi = max(hi, float(finite.max()))
    if not math.isfinite(lo):
        raise EmptyDomain("no non-null cells in dimension columns")
    if hi == lo:
        domain = DimensionDomain(values=[f"[{lo:g}, {hi:g}]"], dtype=NUMERICAL)
        codes = {
            tid: np.where(np.isfinite(arr), 0, -1).astype(np.int64)
            for tid, arr in per_table.items()
        }
        return domain, CellAssignment(codes)
    width = (hi - lo) / bin_count
    edges = [lo + i * width for i in range(bin_count)] + [hi]
    labels = [
        f"[{edges[i]:g}, {edges[i + 1]:g}" + (")" if i < bin_count - 1 else "]")
        for i in range(bin_count)
    ]
    codes = {}
    for tid, arr in per_table.items():
        c = np.floor((arr - lo) / width)
        c = np.clip(c, 0, bin_count - 1)  # hi itself falls in the last (closed) bin
        codes[tid] = np.where(np.isfinite(arr), c, -1).astype(np.int64)
    return DimensionDomain(values=labels, dtype=NUMERICAL), CellAssignment(codes)


def _build_textual(columns, config: EngineConfig):
    cells = []  # (table_id, row, text)
    for tid, col in columns:
        for r, v in enumerate(col.values):
            if v is not None:
                cells.append((tid, r, str(v)))
    if not cells:
        raise EmptyDomain("no non-null cells in dimension columns")
    distinct = {c[2] for c in cells}
    k = min(config.text_kmax, max(1, math.ceil(math.sqrt(len(distinct)))))
    k = min(k, len(distinct))
    vectors = {t: embed_text(t, config.text_dim) for t in distinct}
    texts = sorted(distinct)
    X = np.array([vectors[t] for t in texts])
    if k == 1:
        raw_labels = np.zeros(len(texts), dtype=int)
        centroids = X.mean(axis=0, keepdims=True)
    else:
        km = KMeans(n_clusters=k, init="k-means++", n_init=1, max_iter=25,
                    random_state=config.seed)
        raw_labels = km.fit_predict(X)
        centroids = km.cluster_centers_

    # canonical order: centroid norm, then original cluster id
    norms = np.linalg.norm(centroids, axis=1)
    order = sorted(range(k), key=lambda c: (norms[c], c))
    remap = {old: new for new, old in enumerate(order)}
    text_to_code = {t: remap[int(raw_labels[i])] for i, t in enumerate(texts)}

    token_counts = [Counter() for _ in range(k)]
    for t in texts:
        token_counts[text_to_code[t]].update(tokenize(t))
    labels = []
    for c in range(k):
        top = [tok for tok, _ in token_counts[c].most_common(3)]
        labels.append("cluster-%d: %s" % (c, " ".join(top)) if top else f"cluster-{c}")

    codes = {}
    for tid, col in columns:
        codes[tid] = np.array(
            [text_to_code[str(v)] if v is not None else -1 for v in col.values],
            dtype=np.int64,
        )
    return DimensionDomain(values=labels, dtype=TEXTUAL), CellAssignment(codes)


def build_domain(
    columns: list[tuple[str, TypedColumn]],
    config: EngineConfig | None = None,
) -> tuple[DimensionDomain, CellAssignment]:
    """Build the ordered dimension domain for a query column and its aligned
    columns, plus the per-row assignment of every source cell.

    ``columns`` holds (table_id, column) pairs, query column first; all
    columns share a dtype (ingest drops mixed-dtype alignments).
    """
    cfg = config or EngineConfig()
    dtype = columns[0][1].dtype
    if dtype == CATEGORICAL:
        return _build_categorical(columns)
    if dtype == NUMERICAL:
        return _build_numerical(columns, cfg.bin_count)
    return _build_textual(columns, cfg)
