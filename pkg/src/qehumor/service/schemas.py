"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class RunConfigModel(BaseModel):
    dataset: str = ""
    embeddings: str = ""
    taxonomy: Optional[str] = None
    lm_records: Optional[str] = None
    output_dir: str = "."
    features: list[str] = Field(default=["qe_uncertainty", "qe_incongruity"])
    experiments: list[str] = Field(default=["single"])
    content_baseline: bool = True
    kernel: str = "rbf"
    c: float = 1.0
    gamma: Optional[float] = None
    tol: float = 1e-3
    max_passes: int = 10
    k: int = 10
    repetitions: int = 5
    seeds: Optional[list[int]] = None
    fold_strategy: str = "stratified"
    pair_distance_scope: str = "text"
    content_embedding_mode: str = "raw"
    bins: int = 20
    workers: int = 0


class ArtifactModel(BaseModel):
    filename: str
    content: str


class FeatureRowModel(BaseModel):
    id: str
    label: int
    values: dict[str, float]
    degenerate: list[str]


class FeaturesResponse(BaseModel):
    count: int
    degeneracy_counts: dict[str, int]
    rows: list[FeatureRowModel]
    artifacts: list[ArtifactModel]


class AggregateModel(BaseModel):
    experiment: str
    feature: Optional[str]
    precision: float
    recall: float
    f1: float
    accuracy: float


class EvaluateResponse(BaseModel):
    aggregates: list[AggregateModel]
    artifacts: list[ArtifactModel]


class HistogramResponse(BaseModel):
    features: list[str]
    artifacts: list[ArtifactModel]


class AnalyzeRequest(BaseModel):
    embeddings: str
    setup: str
    punchline: str
    features: list[str] = Field(default=["qe_uncertainty", "qe_incongruity"])
    taxonomy: Optional[str] = None
    pair_distance_scope: str = "text"


class AnalyzeResponse(BaseModel):
    values: dict[str, float]
    degenerate: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
    cached_embedding_tables: int
