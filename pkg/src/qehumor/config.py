"""Run configuration shared by the CLI client and the HTTP service.

A JSON config file supplies base values; command-line flags and (for the
output directory) the QEHUMOR_OUTPUT_DIR environment variable layer on top.
Every report echoes the full resolved configuration for provenance.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

from .errors import ConfigurationError
from .features import FEATURE_NAMES, LM_FEATURES, PAIR_SCOPES

OUTPUT_DIR_ENV = "QEHUMOR_OUTPUT_DIR"
EXPERIMENT_KINDS = ("single", "content")
FOLD_STRATEGIES = ("stratified", "plain")
CONTENT_MODES = ("raw", "normalized")
KERNELS = ("linear", "rbf")


@dataclass
class RunConfig:
    dataset: str = ""
    embeddings: str = ""
    taxonomy: Optional[str] = None
    lm_records: Optional[str] = None
    output_dir: str = "."
    features: list[str] = field(
        default_factory=lambda: ["qe_uncertainty", "qe_incongruity"]
    )
    experiments: list[str] = field(default_factory=lambda: ["single"])
    content_baseline: bool = True  # include the plain mean-embedding run
    kernel: str = "rbf"
    c: float = 1.0
    gamma: Optional[float] = None
    tol: float = 1e-3
    max_passes: int = 10
    k: int = 10
    repetitions: int = 5
    seeds: Optional[list[int]] = None  # default: 0..repetitions-1
    fold_strategy: str = "stratified"
    pair_distance_scope: str = "text"
    content_embedding_mode: str = "raw"
    bins: int = 20
    workers: int = 0  # 0: one worker per available core

    def resolved_seeds(self) -> list[int]:
        return list(self.seeds) if self.seeds is not None else list(range(self.repetitions))

    def resolved_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def validate(self, require_dataset: bool = True) -> None:
        if require_dataset:
            if not self.dataset:
                raise ConfigurationError("dataset path is required (--dataset)")
            if not os.path.exists(self.dataset):
                raise ConfigurationError(f"dataset path does not exist: {self.dataset}")
        if not self.embeddings:
            raise ConfigurationError("embeddings path is required (--embeddings)")
        if not os.path.exists(self.embeddings):
            raise ConfigurationError(f"embeddings path does not exist: {self.embeddings}")
        for label, path in (("taxonomy", self.taxonomy), ("lm_records", self.lm_records)):
            if path is not None and not os.path.exists(path):
                raise ConfigurationError(f"{label} path does not exist: {path}")
        if self.k < 2:
            raise ConfigurationError(f"k must be at least 2, got {self.k}")
        if self.repetitions < 1:
            raise ConfigurationError(f"repetitions must be positive, got {self.repetitions}")
        if self.seeds is not None and len(self.seeds) != self.repetitions:
            raise ConfigurationError(
                f"{len(self.seeds)} seeds given for {self.repetitions} repetitions"
            )
        unknown = [f for f in self.features if f not in FEATURE_NAMES]
        if unknown:
            raise ConfigurationError(f"unknown feature(s): {unknown}")
        if not self.features:
            raise ConfigurationError("feature selection is empty")
        for kind in self.experiments:
            if kind not in EXPERIMENT_KINDS:
                raise ConfigurationError(f"unknown experiment kind {kind!r}")
        if any(f in LM_FEATURES for f in self.features) and not self.lm_records:
            raise ConfigurationError(
                "language-model features need a record file (--lm-records)"
            )
        if "sim_path" in self.features and not self.taxonomy:
            raise ConfigurationError("feature 'sim_path' needs a taxonomy (--taxonomy)")
        if self.kernel not in KERNELS:
            raise ConfigurationError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.fold_strategy not in FOLD_STRATEGIES:
            raise ConfigurationError(
                f"fold_strategy must be one of {FOLD_STRATEGIES}, got {self.fold_strategy!r}"
            )
        if self.pair_distance_scope not in PAIR_SCOPES:
            raise ConfigurationError(
                f"pair_distance_scope must be one of {PAIR_SCOPES}, "
                f"got {self.pair_distance_scope!r}"
            )
        if self.content_embedding_mode not in CONTENT_MODES:
            raise ConfigurationError(
                f"content_embedding_mode must be one of {CONTENT_MODES}, "
                f"got {self.content_embedding_mode!r}"
            )
        if self.bins < 1:
            raise ConfigurationError(f"bins must be positive, got {self.bins}")

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["seeds"] = self.resolved_seeds()
        return payload

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config key(s): {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except FileNotFoundError as exc:
            raise ConfigurationError(f"config file does not exist: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(f"config file {path} must hold a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, overrides: dict) -> "RunConfig":
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_dict(data)
