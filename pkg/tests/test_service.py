"""HTTP facade: session lifecycle, error bodies, persisted recommendations
and explicit plan evaluation."""

import json

import pytest
from fastapi.testclient import TestClient

from vizrec.service import create_app
from vizrec.synth import demo_lake, generate_lake, write_lake


@pytest.fixture()
def env(tmp_path):
    paths = write_lake(demo_lake(), tmp_path / "lake")
    client = TestClient(create_app(tmp_path / "cache"))
    return client, paths, tmp_path


def make_session(client, paths, **extra):
    body = {
        "query": str(paths["query"]),
        "results": [str(p) for p in paths["results"].values()],
        "alignment": str(paths["alignment"]),
    }
    body.update(extra)
    r = client.post("/sessions", json=body)
    assert r.status_code == 201, r.text
    return r.json()


class TestSessions:
    def test_create_returns_schema(self, env):
        client, paths, _ = env
        doc = make_session(client, paths)
        assert doc["session_id"]
        assert doc["schema"]["query"]["table_id"] == "pay_1"
        assert len(doc["schema"]["results"]) == 4
        assert doc["input_digest"]

    def test_results_directory_form(self, env):
        client, paths, tmp = env
        body = {"query": str(paths["query"]), "results": str(tmp / "lake" / "results")}
        r = client.post("/sessions", json=body)
        assert r.status_code == 201
        assert len(r.json()["schema"]["results"]) == 4

    def test_duplicate_sessions_share_digest(self, env):
        client, paths, _ = env
        a = make_session(client, paths)
        b = make_session(client, paths)
        assert a["session_id"] != b["session_id"]
        assert a["input_digest"] == b["input_digest"]

    def test_missing_query_file(self, env):
        client, paths, _ = env
        r = client.post("/sessions", json={"query": "/nope.csv", "results": ["x"]})
        assert r.status_code == 400
        body = r.json()
        assert body["code"] == "io_error" and "message" in body

    def test_malformed_alignment(self, env):
        client, paths, tmp = env
        bad = tmp / "bad.json"
        bad.write_text("{broken")
        r = client.post("/sessions", json={
            "query": str(paths["query"]),
            "results": [str(p) for p in paths["results"].values()],
            "alignment": str(bad),
        })
        assert r.status_code == 400
        assert r.json()["code"] == "parse_error"

    def test_unknown_config_key(self, env):
        client, paths, _ = env
        r = client.post("/sessions", json={
            "query": str(paths["query"]),
            "results": [str(p) for p in paths["results"].values()],
            "config": {"bogus": 1},
        })
        assert r.status_code == 400
        assert r.json()["code"] == "schema_error"

    def test_missing_body_fields(self, env):
        client, _, _ = env
        r = client.post("/sessions", json={})
        assert r.status_code == 400
        assert r.json()["code"] == "schema_error"


class TestSchemaEndpoint:
    def test_get_schema(self, env):
        client, paths, _ = env
        sid = make_session(client, paths)["session_id"]
        r = client.get(f"/sessions/{sid}/schema")
        assert r.status_code == 200
        assert {c["name"] for c in r.json()["query"]["columns"]} == {"City", "Salary"}

    def test_unknown_session(self, env):
        client, _, _ = env
        r = client.get("/sessions/missing/schema")
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_session"


class TestRecommendations:
    def test_payload_shape(self, env):
        client, paths, _ = env
        sid = make_session(client, paths)["session_id"]
        r = client.get(f"/sessions/{sid}/recommendations", params={"n": 5})
        assert r.status_code == 200
        body = r.json()
        assert body["cache_key"]
        assert "timing_ms" in body
        assert 0 < len(body["plans"]) <= 5
        top = body["plans"][0]
        assert set(top["plan"]) == {"A", "M", "F"}
        assert len(top["series"][0]["values"]) == len(top["domain"])

    def test_cache_hit_byte_identical(self, env):
        client, paths, _ = env
        sid = make_session(client, paths)["session_id"]
        r1 = client.get(f"/sessions/{sid}/recommendations")
        r2 = client.get(f"/sessions/{sid}/recommendations")
        assert r1.headers["x-cache-hit"] == "false"
        assert r2.headers["x-cache-hit"] == "true"
        assert r1.content == r2.content

    def test_cache_shared_across_duplicate_sessions(self, env):
        client, paths, _ = env
        a = make_session(client, paths)["session_id"]
        b = make_session(client, paths)["session_id"]
        r1 = client.get(f"/sessions/{a}/recommendations")
        r2 = client.get(f"/sessions/{b}/recommendations")
        assert r2.headers["x-cache-hit"] == "true"
        assert r1.json()["cache_key"] == r2.json()["cache_key"]

    def test_different_params_different_key(self, env):
        client, paths, _ = env
        sid = make_session(client, paths)["session_id"]
        r1 = client.get(f"/sessions/{sid}/recommendations", params={"n": 3})
        r2 = client.get(f"/sessions/{sid}/recommendations", params={"n": 4})
        assert r1.json()["cache_key"] != r2.json()["cache_key"]
        assert r2.headers["x-cache-hit"] == "false"

    def test_n_zero_empty_list(self, env):
        client, paths, _ = env
        sid = make_session(client, paths)["session_id"]
        r = client.get(f"/sessions/{sid}/recommendations", params={"n": 0})
        assert r.status_code == 200
        assert r.json()["plans"] == []

    def test_bad_strategy(self, env):
        client, paths, _ = env
        sid = make_session(client, paths)["session_id"]
        r = client.get(f"/sessions/{sid}/recommendations", params={"strategy": "magic"})
        assert r.status_code == 422

    def test_no_valid_plans(self, env, tmp_path):
        client, _, _ = env
        # single-column query with nothing to pair it with
        q = tmp_path / "solo.csv"
        q.write_text("v\n1\n2\n3\n", encoding="utf-8")
        t = tmp_path / "other.csv"
        t.write_text("v\n4\n5\n6\n", encoding="utf-8")
        r = client.post("/sessions", json={"query": str(q), "results": [str(t)]})
        assert r.status_code == 201
        sid = r.json()["session_id"]
        r2 = client.get(f"/sessions/{sid}/recommendations")
        assert r2.status_code == 422
        assert r2.json()["code"] == "no_valid_plans"

    def test_persisted_on_disk(self, env):
        client, paths, tmp = env
        sid = make_session(client, paths)["session_id"]
        body = client.get(f"/sessions/{sid}/recommendations").json()
        stored = tmp / "cache" / f"{body['cache_key']}.json"
        assert stored.is_file()
        assert json.loads(stored.read_text()) == body


class TestEvaluate:
    def test_known_plan(self, env):
        client, paths, _ = env
        sid = make_session(client, paths)["session_id"]
        r = client.post(f"/sessions/{sid}/plans/evaluate",
                        json={"A": "City", "M": "Salary", "F": "AVG"})
        assert r.status_code == 200
        body = r.json()
        assert body["utility"] == pytest.approx(0.16010868230612274, abs=1e-9)
        assert body["plan_table"]["plan"] == {"A": "City", "M": "Salary", "F": "AVG"}

    @pytest.mark.parametrize("plan", [
        {"A": "City", "M": "City", "F": "COUNT"},     # dimension == measure
        {"A": "Salary", "M": "City", "F": "SUM"},     # SUM on categorical
        {"A": "City", "M": "Salary", "F": "MEDIAN"},  # unknown aggregate
        {"A": "City", "M": "Ghost", "F": "AVG"},      # unknown column
        {"A": "City", "M": "Salary"},                  # missing field
    ])
    def test_invalid_plans(self, env, plan):
        client, paths, _ = env
        sid = make_session(client, paths)["session_id"]
        r = client.post(f"/sessions/{sid}/plans/evaluate", json=plan)
        assert r.status_code == 422
        assert r.json()["code"] == "invalid_plan"

    def test_unknown_session(self, env):
        client, _, _ = env
        r = client.post("/sessions/nope/plans/evaluate",
                        json={"A": "a", "M": "b", "F": "COUNT"})
        assert r.status_code == 404
