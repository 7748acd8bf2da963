"""Plan enumeration, aggregation semantics and aggregate caching."""

import numpy as np
import pytest

from conftest import make_column, make_table
from vizrec.config import EngineConfig
from vizrec.discretize import build_domain
from vizrec.errors import InvalidPlan
from vizrec.plans import (
    AGGREGATES,
    AggregateCache,
    VisualizationPlan,
    enumerate_plans,
    group_aggregate,
    validate_plan,
)
from vizrec.recommender import VisualizationRecommender
from vizrec.series import create_series
from vizrec.synth import demo_lake, generate_lake


def fitted(lake, **kw):
    rec = VisualizationRecommender(prune=False, **kw)
    rec.fit(lake.query, lake.results, lake.alignment)
    return rec


@pytest.fixture(scope="module")
def city_rec():
    return fitted(demo_lake())


def two_table_setup():
    """Query with a categorical dimension and one numeric measure, plus one
    result table carrying both, with some nulls."""
    q = make_table("q", [
        make_column("q", 0, "cat", ["a", "a", "b", None]),
        make_column("q", 1, "m", np.array([1.0, 2.0, 10.0, 5.0])),
    ])
    t = make_table("t", [
        make_column("t", 0, "cat", ["a", "c", "c"]),
        make_column("t", 1, "m", np.array([100.0, np.nan, 7.0])),
    ])
    tables = {"q": q, "t": t}
    dim_cols = [("q", q.columns[0]), ("t", t.columns[0])]
    mea_cols = [("q", q.columns[1]), ("t", t.columns[1])]
    domain, assign = build_domain(dim_cols)
    gamma = create_series(1, mea_cols, "nomerge")
    return tables, domain, assign, gamma


def make_plan(func, tables, domain, assign, gamma):
    return VisualizationPlan(
        plan_id=0, a_index=0, m_index=1, func=func, domain=domain,
        assignment=assign, series_source=gamma, a_label="cat", m_label="m",
    )


class TestGroupAggregate:
    @pytest.fixture(scope="class")
    @staticmethod
    def setup():
        return two_table_setup()

    def _vec(self, setup, func, series_idx):
        tables, domain, assign, gamma = setup
        pt = group_aggregate(make_plan(func, *setup), tables)
        return pt.vectors[series_idx]

    def test_count(self, setup):
        # domain [a, b, c]; series order: t (3 rows) before q (4 rows)
        np.testing.assert_array_equal(self._vec(setup, "COUNT", 1), [2.0, 1.0, 0.0])
        np.testing.assert_array_equal(self._vec(setup, "COUNT", 0), [1.0, 0.0, 2.0])

    def test_sum_skips_nulls(self, setup):
        np.testing.assert_array_equal(self._vec(setup, "SUM", 1), [3.0, 10.0, 0.0])
        np.testing.assert_array_equal(self._vec(setup, "SUM", 0), [100.0, 0.0, 7.0])

    def test_avg_is_sum_over_count(self, setup):
        v = self._vec(setup, "AVG", 1)
        assert v[0] == pytest.approx(1.5)
        assert v[1] == pytest.approx(10.0)
        assert np.isnan(v[2])  # empty group

    def test_min_max(self, setup):
        np.testing.assert_array_equal(self._vec(setup, "MIN", 1), [1.0, 10.0, np.nan])
        np.testing.assert_array_equal(self._vec(setup, "MAX", 1), [2.0, 10.0, np.nan])
        # the null measure cell in group c leaves only 7.0
        v = self._vec(setup, "MIN", 0)
        assert v[2] == 7.0

    def test_scope_restricts_rows(self, setup):
        tables, domain, assign, gamma = setup
        scope = {"q": np.array([0, 1]), "t": np.array([], dtype=int)}
        pt = group_aggregate(make_plan("COUNT", *setup), tables, scope=scope, scope_key="b0")
        np.testing.assert_array_equal(pt.vectors[1], [2.0, 0.0, 0.0])
        np.testing.assert_array_equal(pt.vectors[0], [0.0, 0.0, 0.0])


class TestEnumeration:
    def test_deterministic_order(self, city_rec):
        ids = [p.plan_id for p in city_rec.plans_]
        assert ids == sorted(ids)
        again = fitted(demo_lake())
        assert [p.triple() for p in again.plans_] == [p.triple() for p in city_rec.plans_]

    def test_city_lake_plans(self, city_rec):
        triples = {(p.a_label, p.m_label, p.func) for p in city_rec.plans_}
        assert ("City", "Salary", "AVG") in triples
        # numeric dimension with categorical measure supports COUNT only
        assert ("Salary", "City", "COUNT") in triples
        for a, m, f in triples:
            if m == "City":
                assert f == "COUNT"

    def test_no_self_pairing(self, city_rec):
        assert all(p.a_index != p.m_index for p in city_rec.plans_)

    def test_numeric_measures_get_all_aggregates(self, city_rec):
        funcs = {p.func for p in city_rec.plans_ if p.m_label == "Salary"}
        assert funcs == set(AGGREGATES)

    def test_source_overlap_skipped(self):
        # one result column aligned into both query columns: plans pairing
        # the two query columns would reuse the same physical column
        q = make_table("q", [
            make_column("q", 0, "x", np.array([1.0, 2.0, 3.0, 4.0])),
            make_column("q", 1, "y", np.array([4.0, 5.0, 6.0, 7.0])),
        ])
        t = make_table("t", [make_column("t", 0, "z", np.array([1.0, 5.0, 2.0, 6.0]))])
        from vizrec.tables import AlignmentMap
        from vizrec.synth import Lake

        lake = Lake(query=q, results={"t": t},
                    alignment=AlignmentMap(entries={0: [("t", 0)], 1: [("t", 0)]}))
        rec = fitted(lake)
        assert rec.plans_ == []


class TestValidatePlan:
    def test_valid(self, city_rec):
        validate_plan(city_rec.query_, 0, 1, "AVG")

    def test_same_column(self, city_rec):
        with pytest.raises(InvalidPlan):
            validate_plan(city_rec.query_, 0, 0, "COUNT")

    def test_unknown_func(self, city_rec):
        with pytest.raises(InvalidPlan):
            validate_plan(city_rec.query_, 0, 1, "MEDIAN")

    def test_numeric_func_on_categorical(self, city_rec):
        with pytest.raises(InvalidPlan):
            validate_plan(city_rec.query_, 1, 0, "SUM")


class TestCache:
    def test_count_vectors_shared_across_plans(self, city_rec):
        cache = AggregateCache()
        for plan in city_rec.plans_:
            group_aggregate(plan, city_rec.tables_, cache=cache)
        assert cache.hits >= 4  # COUNT and AVG plans reuse per-table counts

    def test_cache_on_off_identical(self):
        for seed in range(4):
            lake = generate_lake(num_tables=4, rows=120, seed=seed)
            rec = fitted(lake)
            on, off = AggregateCache(enabled=True), AggregateCache(enabled=False)
            for plan in rec.plans_:
                a = group_aggregate(plan, rec.tables_, cache=on)
                b = group_aggregate(plan, rec.tables_, cache=off)
                assert a.labels == b.labels
                for va, vb in zip(a.vectors, b.vectors):
                    assert va.tobytes() == vb.tobytes()

    def test_stats_counting(self):
        cache = AggregateCache()
        assert cache.get_or_compute("k", lambda: 1) == 1
        assert cache.get_or_compute("k", lambda: 2) == 1
        assert cache.stats() == {"hits": 1, "misses": 1}
        cache.clear()
        assert cache.stats() == {"hits": 0, "misses": 0}

    def test_avg_equals_sum_over_count(self):
        lake = generate_lake(num_tables=4, rows=150, seed=1)
        rec = fitted(lake)
        by_key = {}
        for plan in rec.plans_:
            pt = group_aggregate(plan, rec.tables_, cache=rec.cache_)
            by_key[(plan.a_index, plan.m_index, plan.func)] = pt
        for (a, m, f), pt in by_key.items():
            if f != "AVG":
                continue
            s = by_key[(a, m, "SUM")]
            c = by_key[(a, m, "COUNT")]
            for vavg, vsum, vcnt in zip(pt.vectors, s.vectors, c.vectors):
                expect = np.where(vcnt > 0, vsum / np.where(vcnt > 0, vcnt, 1), np.nan)
                np.testing.assert_array_equal(vavg, expect)
