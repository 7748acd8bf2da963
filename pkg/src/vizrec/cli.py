"""Command line entry points: recommend, bench and serve."""

from __future__ import annotations

import csv
import json
import os
import sys
import time
from pathlib import Path

import click

from .config import EngineConfig
from .errors import VizrecError
from .recommender import VisualizationRecommender
from .synth import generate_lake, pruning_lake
from .tables import baseline_align, load_alignment, load_table

STRATEGIES = ("nomerge", "overlap", "stats", "prune")


def _load_inputs(query_path: str, results: tuple[str, ...], alignment_path: str | None):
    query = load_table(query_path)
    paths: list[Path] = []
    for r in results:
        p = Path(r)
        paths.extend(sorted(p.glob("*.csv")) if p.is_dir() else [p])
    tables = {}
    for p in paths:
        t = load_table(p)
        tables[t.table_id] = t
    if alignment_path:
        align = load_alignment(alignment_path, query, tables)
    else:
        align = baseline_align(query, tables)
    return query, tables, align


def _fit_recommender(query, tables, align, strategy: str, prune: bool, **kw):
    merge = "stats" if strategy == "prune" else strategy
    rec = VisualizationRecommender(strategy=merge, prune=prune, **kw)
    rec.fit(query, tables, align)
    return rec


@click.group()
def main():
    """Multi-table bar chart recommendation over data lake search results."""


@main.command()
@click.option("--query", "query_path", required=True, help="Query table CSV.")
@click.option("--results", multiple=True, required=True, help="Result CSVs or a directory of them.")
@click.option("--alignment", "alignment_path", default=None, help="Column alignment JSON.")
@click.option("--n", default=10, show_default=True, help="Number of plans to return.")
@click.option("--strategy", default="stats", show_default=True,
              type=click.Choice(["nomerge", "overlap", "stats"]))
@click.option("--prune", default="on", show_default=True, type=click.Choice(["on", "off"]))
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", default=None, help="Write the JSON payload here instead of stdout.")
def recommend(query_path, results, alignment_path, n, strategy, prune, seed, out_path):
    """Rank the top-n visualization plans for one query table."""
    if not Path(query_path).is_file():
        click.echo(f"query file not found: {query_path}", err=True)
        sys.exit(2)
    try:
        query, tables, align = _load_inputs(query_path, results, alignment_path)
        rec = _fit_recommender(query, tables, align, strategy, prune == "on", n=n, seed=seed)
        rec.recommend()
        payload = rec.recommendation_payload()
    except VizrecError as e:
        click.echo(f"{e.code}: {e}", err=True)
        sys.exit(1)
    text = json.dumps(payload, indent=2)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote {len(payload['plans'])} plans to {out_path}")
    else:
        click.echo(text)


def _bench_rows(suite: str, k: int, seeds: int):
    if suite == "time":
        lakes = [(s, pruning_lake(rows=5000, seed=s)) for s in range(min(seeds, 2))]
    elif suite == "quality":
        lakes = [(s, generate_lake(num_tables=6, rows=150, seed=s)) for s in range(seeds)]
    else:  # scale: one seed, growing fraction of the same lake
        lakes = [
            (int(f * 100), pruning_lake(rows=5000, seed=0, fraction=f))
            for f in (0.2, 0.4, 0.6, 0.8, 1.0)
        ]
    for seed, lake in lakes:
        for strategy in STRATEGIES:
            rec = _fit_recommender(
                lake.query, lake.results, lake.alignment,
                strategy, strategy == "prune", n=k, seed=0,
            )
            start = time.perf_counter()
            ranked = rec.recommend()
            elapsed = (time.perf_counter() - start) * 1000.0
            avg = sum(score for _, score, _ in ranked) / max(len(ranked), 1)
            yield {
                "suite": suite,
                "strategy": strategy,
                "k": k,
                "seed": seed,
                "query_id": lake.query.table_id,
                "time_ms": round(elapsed, 3),
                "avg_utility": avg,
            }


@main.command()
@click.option("--suite", required=True, type=click.Choice(["time", "quality", "scale"]))
@click.option("--k", default=10, show_default=True)
@click.option("--seeds", default=5, show_default=True)
@click.option("--out", "out_path", required=True, help="Destination CSV.")
def bench(suite, k, seeds, out_path):
    """Benchmark all merge strategies on seeded synthetic lakes."""
    fields = ["suite", "strategy", "k", "seed", "query_id", "time_ms", "avg_utility"]
    with open(out_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=fields)
        writer.writeheader()
        for row in _bench_rows(suite, k, seeds):
            writer.writerow(row)
            f.flush()
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--port", default=None, type=int, help="Defaults to $VIZREC_PORT or 8000.")
@click.option("--data-dir", default=None, help="Defaults to $VIZREC_DATA_DIR.")
def serve(port, data_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    port = port or int(os.environ.get("VIZREC_PORT", "8000"))
    uvicorn.run(create_app(data_dir), host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
