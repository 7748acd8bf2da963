"""Command line interface: recommend, bench and exit codes."""

import csv
import json

import pytest
from click.testing import CliRunner

from vizrec.cli import main
from vizrec.synth import demo_lake, write_lake


@pytest.fixture()
def lake_paths(tmp_path):
    return write_lake(demo_lake(), tmp_path / "lake"), tmp_path


def run(*args):
    return CliRunner().invoke(main, list(args))


class TestRecommend:
    def test_writes_payload(self, lake_paths):
        paths, tmp = lake_paths
        out = tmp / "out.json"
        res = run(
            "recommend",
            "--query", str(paths["query"]),
            "--results", str(tmp / "lake" / "results"),
            "--alignment", str(paths["alignment"]),
            "--n", "3", "--out", str(out),
        )
        assert res.exit_code == 0, res.output
        payload = json.loads(out.read_text())
        assert len(payload["plans"]) == 3
        assert payload["plans"][0]["rank"] == 1
        scores = [p["score"] for p in payload["plans"]]
        assert scores == sorted(scores, reverse=True)

    def test_stdout_by_default(self, lake_paths):
        paths, tmp = lake_paths
        res = run(
            "recommend",
            "--query", str(paths["query"]),
            "--results", str(tmp / "lake" / "results"),
            "--n", "2",
        )
        assert res.exit_code == 0
        assert json.loads(res.output)["config"]["n"] == 2

    def test_missing_query_exits_2(self, lake_paths):
        paths, tmp = lake_paths
        res = run(
            "recommend",
            "--query", str(tmp / "missing.csv"),
            "--results", str(tmp / "lake" / "results"),
        )
        assert res.exit_code == 2

    def test_prune_off_allowed(self, lake_paths):
        paths, tmp = lake_paths
        res = run(
            "recommend",
            "--query", str(paths["query"]),
            "--results", str(tmp / "lake" / "results"),
            "--prune", "off", "--strategy", "nomerge", "--n", "1",
        )
        assert res.exit_code == 0
        assert json.loads(res.output)["config"]["prune"] is False


class TestBench:
    def test_quality_suite_csv(self, tmp_path):
        out = tmp_path / "bench.csv"
        res = run("bench", "--suite", "quality", "--k", "4", "--seeds", "2",
                  "--out", str(out))
        assert res.exit_code == 0, res.output
        rows = list(csv.DictReader(out.open()))
        assert {r["strategy"] for r in rows} == {"nomerge", "overlap", "stats", "prune"}
        assert {r["seed"] for r in rows} == {"0", "1"}
        for r in rows:
            assert r["suite"] == "quality"
            assert r["k"] == "4"
            assert float(r["time_ms"]) >= 0
            float(r["avg_utility"])  # parses

    def test_csv_header_schema(self, tmp_path):
        out = tmp_path / "bench.csv"
        res = run("bench", "--suite", "quality", "--k", "3", "--seeds", "1",
                  "--out", str(out))
        assert res.exit_code == 0
        header = out.read_text().splitlines()[0]
        assert header == "suite,strategy,k,seed,query_id,time_ms,avg_utility"

    def test_unknown_suite_rejected(self, tmp_path):
        res = run("bench", "--suite", "nonsense", "--out", str(tmp_path / "x.csv"))
        assert res.exit_code != 0
