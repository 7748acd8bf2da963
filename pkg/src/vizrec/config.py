"""Engine configuration.

All tunables live here so a run is fully described by one config object
plus the input files.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict, fields


@dataclass
class EngineConfig:
    # ingest / type inference
    numeric_ratio: float = 0.95       # share of non-null cells that must parse as numbers
    textual_distinct_ratio: float = 0.5
    textual_min_tokens: float = 3.0   # mean tokens per cell above which a column is textual
    align_threshold: float = 0.3      # fallback aligner acceptance score
    align_sample: int = 200           # value sample size for the fallback aligner

    # discretization
    bin_count: int = 10
    text_dim: int = 64
    text_kmax: int = 8

    # series creation
    strategy: str = "stats"           # nomerge | overlap | stats
    W: int = 500
    delta: float = 0.05
    overlap_threshold: float = 0.5
    skew_threshold: float = 1.5       # sample skewness above which numeric fits go exponential
    chi2_buckets: int = 10
    min_expected: float = 5.0         # chi-square E_i floor before bucket merging

    # candidate generation / ranking
    n: int = 10
    n_prime: int = 0                  # 0 means "same as n"
    batch_count: int = 10
    prune: bool = True
    include_unaligned_measures: bool = False

    seed: int = 0

    def resolved_n_prime(self) -> int:
        return self.n_prime if self.n_prime > 0 else self.n

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})
