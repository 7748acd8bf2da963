"""Dimension domain construction for all three column types."""

import numpy as np
import pytest

from conftest import make_column
from vizrec.config import EngineConfig
from vizrec.discretize import build_domain, embed_text
from vizrec.errors import EmptyDomain
from vizrec.tables import CATEGORICAL, NUMERICAL, TEXTUAL


class TestCategorical:
    def test_sorted_distinct_domain(self):
        c1 = make_column("q", 0, "region", ["west", "east", None, "east"])
        c2 = make_column("t", 0, "region", ["north", "east"])
        domain, assign = build_domain([("q", c1), ("t", c2)])
        assert domain.values == ["east", "north", "west"]
        assert assign.codes["q"].tolist() == [2, 0, -1, 0]
        assert assign.codes["t"].tolist() == [1, 0]

    def test_all_null_raises(self):
        c = make_column("q", 0, "x", [None, None])
        with pytest.raises(EmptyDomain):
            build_domain([("q", c)])


class TestNumerical:
    def test_equi_width_bins(self):
        c = make_column("q", 0, "v", np.array([0.0, 10.0, 5.0, np.nan]))
        domain, assign = build_domain([("q", c)], EngineConfig(bin_count=5))
        assert len(domain) == 5
        # width 2: 0 -> bin 0, 5 -> bin 2, 10 (global max) -> closed last bin
        assert assign.codes["q"].tolist() == [0, 4, 2, -1]

    def test_global_range_spans_all_columns(self):
        c1 = make_column("q", 0, "v", np.array([0.0, 1.0]))
        c2 = make_column("t", 0, "v", np.array([9.0, 10.0]))
        domain, assign = build_domain([("q", c1), ("t", c2)], EngineConfig(bin_count=10))
        assert assign.codes["q"].tolist() == [0, 1]
        assert assign.codes["t"].tolist() == [9, 9]

    def test_constant_column_single_value_domain(self):
        c = make_column("q", 0, "v", np.full(4, 7.0))
        domain, assign = build_domain([("q", c)])
        assert len(domain) == 1
        assert assign.codes["q"].tolist() == [0, 0, 0, 0]

    def test_bin_labels_cover_range(self):
        c = make_column("q", 0, "v", np.array([0.0, 100.0]))
        domain, _ = build_domain([("q", c)], EngineConfig(bin_count=4))
        assert domain.values[0].startswith("[0")
        assert domain.values[-1].endswith("100]")


class TestTextual:
    def _col(self, table_id, texts):
        return make_column(table_id, 0, "desc", list(texts), dtype=TEXTUAL)

    def test_clusters_group_similar_texts(self):
        animals = [f"furry {a} animal pet" for a in ("cat", "dog", "hamster")]
        vehicles = [f"fast {v} road vehicle" for v in ("car", "truck", "bike")]
        c = self._col("q", animals + vehicles)
        domain, assign = build_domain([("q", c)], EngineConfig(text_kmax=2))
        assert len(domain) == 2
        codes = assign.codes["q"]
        assert len(set(codes[:3])) == 1
        assert len(set(codes[3:])) == 1
        assert codes[0] != codes[3]

    def test_deterministic_across_calls(self):
        texts = [f"sample text number {i} with words" for i in range(12)]
        c = self._col("q", texts)
        d1, a1 = build_domain([("q", c)])
        d2, a2 = build_domain([("q", c)])
        assert d1.values == d2.values
        assert np.array_equal(a1.codes["q"], a2.codes["q"])

    def test_embed_is_order_invariant(self):
        assert np.allclose(embed_text("alpha beta gamma", 32), embed_text("gamma alpha beta", 32))

    def test_embed_unit_norm(self):
        assert np.linalg.norm(embed_text("some words here", 64)) == pytest.approx(1.0)


def test_dtype_tag_matches_input():
    cat = make_column("q", 0, "c", ["a", "b"])
    num = make_column("q", 0, "n", np.array([1.0, 2.0]))
    assert build_domain([("q", cat)])[0].dtype == CATEGORICAL
    assert build_domain([("q", num)])[0].dtype == NUMERICAL
