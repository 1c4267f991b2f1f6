"""FastAPI service exposing feature extraction, evaluation, and histograms.

The service holds a cache of loaded embedding tables keyed by path and file
stamp, so repeated requests against the same resources skip the expensive
load. Everything else is computed per request from the posted configuration.
"""

from __future__ import annotations

import os
import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import RunConfig
from ..embeddings import EmbeddingTable, load_embeddings
from ..errors import QehumorError
from ..runner import analyze_pair, run_evaluate, run_features, run_histogram
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    EvaluateResponse,
    FeaturesResponse,
    HealthResponse,
    HistogramResponse,
    RunConfigModel,
)


class EmbeddingCache:
    """Path-keyed table cache, invalidated when the file stamp changes."""

    def __init__(self):
        self._lock = threading.Lock()
        self._tables: dict[str, tuple[tuple, EmbeddingTable]] = {}

    def get(self, path: str) -> EmbeddingTable:
        stat = os.stat(path)
        stamp = (stat.st_mtime_ns, stat.st_size)
        with self._lock:
            cached = self._tables.get(path)
            if cached is not None and cached[0] == stamp:
                return cached[1]
        table = load_embeddings(path)
        with self._lock:
            self._tables[path] = (stamp, table)
        return table

    def __len__(self) -> int:
        with self._lock:
            return len(self._tables)


def create_app() -> FastAPI:
    app = FastAPI(title="qehumor", version=__version__)
    cache = EmbeddingCache()
    app.state.embedding_cache = cache

    @app.exception_handler(QehumorError)
    async def domain_error(request: Request, exc: QehumorError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(FileNotFoundError)
    async def missing_file(request: Request, exc: FileNotFoundError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok", version=__version__, cached_embedding_tables=len(cache)
        )

    @app.post("/features", response_model=FeaturesResponse)
    def features_endpoint(config: RunConfigModel) -> FeaturesResponse:
        result = run_features(
            RunConfig.from_dict(config.model_dump()), table_loader=cache.get
        )
        return FeaturesResponse(
            count=len(result.rows),
            degeneracy_counts=result.degeneracy_counts,
            rows=result.rows,
            artifacts=[a.__dict__ for a in result.artifacts],
        )

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate_endpoint(config: RunConfigModel) -> EvaluateResponse:
        result = run_evaluate(
            RunConfig.from_dict(config.model_dump()), table_loader=cache.get
        )
        return EvaluateResponse(
            aggregates=result.aggregates,
            artifacts=[a.__dict__ for a in result.artifacts],
        )

    @app.post("/histogram", response_model=HistogramResponse)
    def histogram_endpoint(config: RunConfigModel) -> HistogramResponse:
        result = run_histogram(
            RunConfig.from_dict(config.model_dump()), table_loader=cache.get
        )
        return HistogramResponse(
            features=result.features,
            artifacts=[a.__dict__ for a in result.artifacts],
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze_endpoint(request: AnalyzeRequest) -> AnalyzeResponse:
        result = analyze_pair(
            request.embeddings,
            request.setup,
            request.punchline,
            request.features,
            taxonomy_path=request.taxonomy,
            pair_scope=request.pair_distance_scope,
            table_loader=cache.get,
        )
        return AnalyzeResponse(**result)

    return app


app = create_app()
