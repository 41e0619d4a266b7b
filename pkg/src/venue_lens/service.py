"""Read-only HTTP API over a corpus snapshot.

Everything is loaded and reduced once at startup into an immutable snapshot;
request handlers only read it. Whole-period divergence matrices are
precomputed; per-year matrices and drift series are memoized on first
request (results are deterministic either way, startup just stays quick for
large corpora).

Error responses carry a machine-readable body:
``{"error": {"code": "...", "message": "..."}}``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import divergence as div
from . import drift as drift_mod
from .corpus import load_corpus
from .errors import DocumentNotFoundError, InsufficientSamplesError
from .explore import CorpusExplorer
from .reduction import ReducedCorpus, load_model

DEFAULT_PAGE_SIZE = 200
MAX_PAGE_SIZE = 500


@dataclass
class ApiConfig:
    corpus_path: str
    model_path: str
    port: int = 8080
    host: str = "127.0.0.1"
    cors_origins: tuple = ("*",)
    default_page_size: int = DEFAULT_PAGE_SIZE
    max_page_size: int = MAX_PAGE_SIZE
    static_dir: str | None = None
    probe_seed: int = 17

    def validate(self):
        if self.max_page_size > MAX_PAGE_SIZE:
            raise ValueError(f"max_page_size cannot exceed {MAX_PAGE_SIZE}")
        for name in ("corpus_path", "model_path"):
            path = getattr(self, name)
            if not Path(path).is_file():
                raise FileNotFoundError(f"{name} does not exist: {path}")
        if self.static_dir is not None and not Path(self.static_dir).is_dir():
            raise FileNotFoundError(f"static_dir does not exist: {self.static_dir}")


class ApiError(Exception):
    def __init__(self, status, code, message):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class Snapshot:
    """Immutable in-memory state shared by all request handlers."""

    config: ApiConfig
    records: list
    model: object
    reduced: ReducedCorpus
    explorer: CorpusExplorer
    matrices: dict = field(default_factory=dict)
    drift_cache: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def venues(self):
        return self.reduced.venue_codes

    def matrix(self, mode, year=None):
        key = (mode, year)
        with self.lock:
            cached = self.matrices.get(key)
        if cached is not None:
            return cached
        try:
            dists = div.distributions_by_venue(
                self.reduced, year=year, model_id=self.model.model_id
            )
            matrix = div.divergence_matrix(
                dists, self.model.explained_variance_ratio_, mode=mode
            )
        except InsufficientSamplesError as exc:
            raise ApiError(400, "insufficient_samples", str(exc)) from exc
        with self.lock:
            self.matrices[key] = matrix
        return matrix

    def drift(self, anchor, metric):
        key = (anchor, metric)
        with self.lock:
            cached = self.drift_cache.get(key)
        if cached is not None:
            return cached
        series = drift_mod.drift_series_for_anchor(
            self.reduced,
            anchor,
            metric,
            explained_ratio=self.model.explained_variance_ratio_,
            seed=self.config.probe_seed,
            model_id=self.model.model_id,
        )
        with self.lock:
            self.drift_cache[key] = series
        return series


def build_snapshot(config):
    config.validate()
    records = load_corpus(config.corpus_path)
    model = load_model(config.model_path)
    reduced = ReducedCorpus.from_records(records, model)
    explorer = CorpusExplorer(records, reduced)
    snapshot = Snapshot(
        config=config, records=records, model=model, reduced=reduced, explorer=explorer
    )
    # the whole-period matrices are the common request; warm them eagerly
    snapshot.matrix(div.MODE_DIRECTED)
    snapshot.matrix(div.MODE_SYMMETRIZED)
    return snapshot


def _doc_payload(record):
    return {
        "doc_id": record.doc_id,
        "external_ids": record.external_ids,
        "title": record.title,
        "abstract": record.abstract,
        "venue": record.venue,
        "year": record.year,
    }


def create_app(config, snapshot=None):
    state = snapshot if snapshot is not None else build_snapshot(config)
    app = FastAPI(title="venue-lens", docs_url=None, redoc_url=None)
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["GET"],
            allow_headers=["*"],
        )

    def clamp_limit(limit):
        if limit is None:
            return config.default_page_size
        return max(1, min(limit, config.max_page_size))

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "invalid_parameter", "message": str(exc.errors())}},
        )

    def get_record(doc_id):
        try:
            return state.explorer.record(doc_id)
        except DocumentNotFoundError:
            raise ApiError(404, "doc_not_found", f"no document with id '{doc_id}'") from None

    @app.get("/api/points")
    def points(
        venue: list[str] | None = Query(default=None),
        year_from: int | None = None,
        year_to: int | None = None,
        offset: int = Query(default=0, ge=0),
        limit: int | None = Query(default=None, ge=1),
    ):
        wanted = set(venue) if venue else None
        rows = [
            {"doc_id": p.doc_id, "x": p.x, "y": p.y, "venue": p.venue, "year": p.year}
            for p in state.explorer.points()
            if (wanted is None or p.venue in wanted)
            and (year_from is None or p.year >= year_from)
            and (year_to is None or p.year <= year_to)
        ]
        page = rows[offset : offset + clamp_limit(limit)]
        return JSONResponse(content=page, headers={"X-Total-Count": str(len(rows))})

    @app.get("/api/doc/{doc_id}")
    def doc_detail(doc_id: str):
        return _doc_payload(get_record(doc_id))

    @app.get("/api/doc/{doc_id}/related")
    def doc_related(doc_id: str, k: int = Query(default=10, ge=1, le=100)):
        get_record(doc_id)
        return [
            {
                "doc_id": rec.doc_id,
                "title": rec.title,
                "venue": rec.venue,
                "year": rec.year,
                "similarity": sim,
            }
            for rec, sim in state.explorer.related(doc_id, k)
        ]

    @app.get("/api/doc/{doc_id}/terms")
    def doc_terms(
        doc_id: str,
        k: int = Query(default=10, ge=1, le=100),
        m: int = Query(default=8, ge=1, le=50),
    ):
        get_record(doc_id)
        return [
            {
                "term": s.term,
                "neighborhood_freq": s.neighborhood_freq,
                "corpus_rate": s.corpus_rate,
                "score": s.score,
            }
            for s in state.explorer.suggest_terms(doc_id, k, m)
        ]

    @app.get("/api/search")
    def search(
        q: str,
        offset: int = Query(default=0, ge=0),
        limit: int | None = Query(default=None, ge=1),
    ):
        if not q.strip():
            raise ApiError(400, "invalid_parameter", "query must be non-empty")
        hits = [
            {
                "doc_id": rec.doc_id,
                "title": rec.title,
                "venue": rec.venue,
                "year": rec.year,
                "match_count": count,
            }
            for rec, count in state.explorer.search(q)
        ]
        page = hits[offset : offset + clamp_limit(limit)]
        return JSONResponse(content=page, headers={"X-Total-Count": str(len(hits))})

    @app.get("/api/matrix")
    def matrix(mode: str = div.MODE_DIRECTED, year: int | None = None):
        if mode not in (div.MODE_DIRECTED, div.MODE_SYMMETRIZED):
            raise ApiError(
                400, "invalid_parameter", f"mode must be directed or symmetrized, got '{mode}'"
            )
        return state.matrix(mode, year).to_dict()

    @app.get("/api/drift")
    def drift(anchor: str, metric: str = "kl"):
        metric_name = {"kl": drift_mod.METRIC_DIVERGENCE, "probe": drift_mod.METRIC_ACCURACY}.get(
            metric
        )
        if metric_name is None:
            raise ApiError(400, "invalid_parameter", f"metric must be kl or probe, got '{metric}'")
        if anchor not in state.venues:
            raise ApiError(404, "venue_not_found", f"no venue '{anchor}' in corpus")
        return [series.to_dict() for series in state.drift(anchor, metric_name)]

    if config.static_dir is not None:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="webui")

    return app
