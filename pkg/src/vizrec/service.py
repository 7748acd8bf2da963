"""HTTP facade over the recommendation pipeline.

Sessions load a query table, result tables and an alignment from disk and
keep them in memory; recommendation payloads are persisted as
content-addressed JSON files (key = hash of table bytes + alignment +
config, seed included), so identical inputs always produce byte-identical
responses. Errors use a structured ``{"code", "message"}`` body.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .config import EngineConfig
from .errors import InvalidPlan, SchemaError, VizrecError
from .recommender import VisualizationRecommender, schema_document
from .tables import AlignmentMap, LakeTable, baseline_align, load_alignment, load_table


@dataclass
class Session:
    session_id: str
    query: LakeTable
    results: dict[str, LakeTable]
    alignment: AlignmentMap
    config: EngineConfig
    input_digest: str
    locks: dict[str, threading.Lock] = field(default_factory=dict)
    guard: threading.Lock = field(default_factory=threading.Lock)

    def key_lock(self, key: str) -> threading.Lock:
        with self.guard:
            return self.locks.setdefault(key, threading.Lock())


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _digest_inputs(query_path: Path, result_paths: list[Path], alignment: AlignmentMap) -> str:
    h = hashlib.sha256()
    h.update(query_path.read_bytes())
    for p in sorted(result_paths):
        h.update(str(p.name).encode())
        h.update(p.read_bytes())
    align_doc = {
        "entries": {str(k): v for k, v in sorted(alignment.entries.items())},
        "dropped": alignment.dropped,
    }
    h.update(json.dumps(align_doc, sort_keys=True).encode())
    return h.hexdigest()


def _resolve_results(body: dict) -> list[Path]:
    raw = body.get("results")
    if isinstance(raw, str):
        root = Path(raw)
        if not root.is_dir():
            raise ApiError(400, "io_error", f"results directory {raw!r} not found")
        paths = sorted(root.glob("*.csv"))
        if not paths:
            raise ApiError(400, "io_error", f"no CSV files under {raw!r}")
        return paths
    if isinstance(raw, list) and raw:
        return [Path(p) for p in raw]
    raise ApiError(400, "schema_error", "body must provide 'results' (paths or a directory)")


def _merge_config(base: EngineConfig, overrides: dict) -> EngineConfig:
    merged = base.to_dict()
    known = set(merged)
    unknown = set(overrides) - known
    if unknown:
        raise ApiError(400, "schema_error", f"unknown config keys: {sorted(unknown)}")
    merged.update(overrides)
    return EngineConfig.from_dict(merged)


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    data_dir = Path(data_dir or os.environ.get("VIZREC_DATA_DIR", ".vizrec-cache"))
    data_dir.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="vizrec")
    sessions: dict[str, Session] = {}

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError):
        return _error(exc.status, exc.code, exc.message)

    @app.exception_handler(VizrecError)
    async def _engine_error(_: Request, exc: VizrecError):
        return _error(400, exc.code, str(exc))

    def session_or_404(session_id: str) -> Session:
        s = sessions.get(session_id)
        if s is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return s

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(...)):
        qpath = body.get("query")
        if not qpath:
            raise ApiError(400, "schema_error", "body must provide 'query' (CSV path)")
        query = load_table(qpath)
        result_paths = _resolve_results(body)
        results = {}
        for p in result_paths:
            t = load_table(p)
            if t.table_id == query.table_id:
                raise SchemaError(f"result table id {t.table_id!r} collides with the query")
            results[t.table_id] = t
        if body.get("alignment"):
            alignment = load_alignment(body["alignment"], query, results)
        else:
            alignment = baseline_align(query, results)
        config = _merge_config(EngineConfig(), body.get("config") or {})
        session = Session(
            session_id=uuid.uuid4().hex,
            query=query,
            results=results,
            alignment=alignment,
            config=config,
            input_digest=_digest_inputs(Path(qpath), result_paths, alignment),
        )
        sessions[session.session_id] = session
        return {
            "session_id": session.session_id,
            "input_digest": session.input_digest,
            "config": config.to_dict(),
            "schema": schema_document(query, results, alignment),
        }

    @app.get("/sessions/{session_id}/schema")
    def get_schema(session_id: str):
        s = session_or_404(session_id)
        return schema_document(s.query, s.results, s.alignment)

    @app.get("/sessions/{session_id}/recommendations")
    def get_recommendations(
        session_id: str,
        response: Response,
        n: int | None = None,
        strategy: str | None = None,
        prune: bool | None = None,
    ):
        s = session_or_404(session_id)
        overrides = {}
        if n is not None:
            if n < 0:
                raise ApiError(422, "invalid_plan", "n must be >= 0")
            overrides["n"] = n
        if strategy is not None:
            if strategy.lower() not in ("nomerge", "overlap", "stats"):
                raise ApiError(422, "invalid_plan", f"unknown strategy {strategy!r}")
            overrides["strategy"] = strategy.lower()
        if prune is not None:
            overrides["prune"] = prune
        cfg = _merge_config(s.config, overrides)

        key_src = s.input_digest + json.dumps(cfg.to_dict(), sort_keys=True)
        key = hashlib.sha256(key_src.encode()).hexdigest()
        cache_file = data_dir / f"{key}.json"
        with s.key_lock(key):
            if cache_file.exists():
                response.headers["X-Cache-Hit"] = "true"
                return json.loads(cache_file.read_text(encoding="utf-8"))
            rec = VisualizationRecommender(**_recommender_params(cfg))
            rec.fit(s.query, s.results, s.alignment)
            if not rec.plans_:
                raise ApiError(422, "no_valid_plans", "no valid plans for this session")
            rec.recommend()
            payload = rec.recommendation_payload()
            payload["cache_key"] = key
            cache_file.write_text(json.dumps(payload), encoding="utf-8")
            response.headers["X-Cache-Hit"] = "false"
            return payload

    @app.post("/sessions/{session_id}/plans/evaluate")
    def evaluate_plan(session_id: str, body: dict = Body(...)):
        s = session_or_404(session_id)
        missing = [k for k in ("A", "M", "F") if not body.get(k)]
        if missing:
            raise ApiError(422, "invalid_plan", f"missing plan fields: {missing}")
        rec = VisualizationRecommender(**_recommender_params(s.config))
        rec.fit(s.query, s.results, s.alignment)
        try:
            pt, score = rec.evaluate_plan(body["A"], body["M"], str(body["F"]))
        except (InvalidPlan, SchemaError, KeyError, IndexError) as e:
            raise ApiError(422, "invalid_plan", str(e)) from e
        return {
            "plan_table": pt.to_payload(s.query),
            "utility": score,
        }

    return app


def _recommender_params(cfg: EngineConfig) -> dict:
    return {
        "n": cfg.n,
        "n_prime": cfg.n_prime,
        "strategy": cfg.strategy,
        "prune": cfg.prune,
        "batch_count": cfg.batch_count,
        "delta": cfg.delta,
        "W": cfg.W,
        "bin_count": cfg.bin_count,
        "include_unaligned_measures": cfg.include_unaligned_measures,
        "seed": cfg.seed,
    }
