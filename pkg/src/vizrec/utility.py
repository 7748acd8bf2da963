"""Interestingness scoring: average pairwise 1-D earth mover's distance
between the normalized per-series vectors of a plan table."""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch
from .plans import PlanTable


def normalize(vec: np.ndarray) -> tuple[np.ndarray, bool]:
    """Turn a raw aggregate vector into a probability vector.

    Empty groups (NaN) contribute zero mass. Negative entries are shifted up
    by the minimum first. A zero-sum vector falls back to the uniform
    distribution; the returned flag marks that degenerate case.
    """
    v = np.asarray(vec, dtype=float).copy()
    v[np.isnan(v)] = 0.0
    mn = v.min() if v.size else 0.0
    if mn < 0:
        v = v - mn
    total = v.sum()
    if total <= 0:
        return np.full(v.shape, 1.0 / len(v)), True
    return v / total, False


def emd(p: np.ndarray, q: np.ndarray) -> float:
    """1-D earth mover's distance with unit spacing between adjacent domain
    values: the sum of absolute CDF differences."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise LengthMismatch(f"{p.shape} vs {q.shape}")
    return float(np.abs(np.cumsum(p - q)[:-1]).sum())


def utility(pt: PlanTable) -> float:
    """Average pairwise EMD over the plan's normalized series vectors."""
    v = len(pt.vectors)
    if v <= 1:
        return 0.0
    dists = [normalize(vec)[0] for vec in pt.vectors]
    total = 0.0
    for i in range(v):
        for j in range(i + 1, v):
            total += emd(dists[i], dists[j])
    return 2.0 / (v * (v - 1)) * total
