import numpy as np
import pytest

from vizrec.synth import Lake, demo_lake, generate_lake
from vizrec.tables import (
    CATEGORICAL,
    NUMERICAL,
    LakeTable,
    TypedColumn,
)


@pytest.fixture(scope="session")
def city_lake() -> Lake:
    return demo_lake()


@pytest.fixture(scope="session")
def small_lakes() -> list[Lake]:
    """Twenty seeded lakes within the small-fixture envelope."""
    lakes = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        lakes.append(
            generate_lake(
                num_tables=int(rng.integers(3, 7)),
                rows=int(rng.integers(60, 201)),
                num_columns=int(rng.integers(3, 9)),
                seed=seed,
            )
        )
    return lakes


def make_column(table_id, idx, header, values, dtype=None):
    if dtype is None:
        dtype = NUMERICAL if isinstance(values, np.ndarray) else CATEGORICAL
    if dtype == NUMERICAL and not isinstance(values, np.ndarray):
        values = np.asarray(values, dtype=float)
    return TypedColumn(column_id=f"{table_id}:{idx}", header=header, dtype=dtype, values=values)


def make_table(table_id, columns):
    return LakeTable(
        table_id=table_id,
        name=table_id,
        columns=columns,
        row_count=len(columns[0].values),
    )
