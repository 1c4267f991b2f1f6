"""End-to-end runs behind the service endpoints.

Each entry point takes a validated RunConfig, computes everything in memory,
and returns named text artifacts. Persisting them is the client's job, which
keeps the HTTP layer stateless apart from an embedding-table cache.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import corpus, features
from .classify import SvmConfig
from .config import RunConfig
from .embeddings import EmbeddingTable, load_embeddings
from .errors import ConfigurationError
from .evaluation import (
    CvConfig,
    EvalReport,
    count_degeneracies,
    feature_histograms,
    histogram_table,
    run_content_experiment,
    run_single_feature_experiment,
)
from .features import FeatureVector, LM_FEATURES

TableLoader = Callable[[str], EmbeddingTable]


@dataclass(frozen=True)
class Artifact:
    filename: str
    content: str


@dataclass
class FeatureRunResult:
    rows: list[dict]
    degeneracy_counts: dict[str, int]
    artifacts: list[Artifact] = field(default_factory=list)


@dataclass
class EvaluateRunResult:
    aggregates: list[dict]
    artifacts: list[Artifact] = field(default_factory=list)


@dataclass
class HistogramRunResult:
    features: list[str]
    artifacts: list[Artifact] = field(default_factory=list)


def _load_corpus(config: RunConfig):
    samples = corpus.load_dataset(config.dataset)
    tokenized = [corpus.tokenize_sample(s) for s in samples]
    labels = [s.label for s in samples]
    return tokenized, labels


def _load_resources(config: RunConfig, table_loader: TableLoader):
    table = table_loader(config.embeddings)
    tax = features.load_taxonomy(config.taxonomy) if config.taxonomy else None
    records = features.read_lm_records(config.lm_records) if config.lm_records else None
    return table, tax, records


def extract_feature_vectors(
    tokenized, table, tax, records, selection, pair_scope: str, workers: int
) -> list[FeatureVector]:
    def one(sample):
        return features.extract_all(
            sample, table, tax, records, selection=selection, pair_scope=pair_scope
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, tokenized))
    return [one(sample) for sample in tokenized]


def _cv_config(config: RunConfig) -> CvConfig:
    return CvConfig(
        k=config.k,
        seeds=tuple(config.resolved_seeds()),
        stratified=config.fold_strategy == "stratified",
        svm=SvmConfig(
            kernel=config.kernel,
            c=config.c,
            gamma=config.gamma,
            tol=config.tol,
            max_passes=config.max_passes,
        ),
        workers=config.resolved_workers(),
    )


def _feature_table(tokenized, labels, vectors, selection) -> str:
    header = ["id", "label", *selection, "degenerate_features"]
    lines = ["\t".join(header)]
    for sample, label, fv in zip(tokenized, labels, vectors):
        flags = ",".join(sorted(fv.degeneracy_flags))
        cells = [sample.id, str(label)]
        cells += [repr(fv.values[name]) for name in selection]
        cells.append(flags)
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def _report_json(reports: list[EvalReport], config: RunConfig) -> str:
    payload = {
        "config": config.to_dict(),
        "reports": [r.to_dict() for r in reports],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def run_features(
    config: RunConfig, table_loader: TableLoader = load_embeddings
) -> FeatureRunResult:
    """Feature table: one row per sample with the selected feature values."""
    config.validate()
    tokenized, labels = _load_corpus(config)
    table, tax, records = _load_resources(config, table_loader)
    selection = features.validate_selection(config.features)
    vectors = extract_feature_vectors(
        tokenized,
        table,
        tax,
        records,
        selection,
        config.pair_distance_scope,
        config.resolved_workers(),
    )
    rows = [
        {
            "id": fv.sample_id,
            "label": label,
            "values": fv.values,
            "degenerate": sorted(fv.degeneracy_flags),
        }
        for fv, label in zip(vectors, labels)
    ]
    artifact = Artifact("features.tsv", _feature_table(tokenized, labels, vectors, selection))
    return FeatureRunResult(
        rows=rows,
        degeneracy_counts=count_degeneracies(vectors),
        artifacts=[artifact],
    )


def run_evaluate(
    config: RunConfig, table_loader: TableLoader = load_embeddings
) -> EvaluateRunResult:
    """Single-feature and/or content experiments over the configured dataset."""
    config.validate()
    tokenized, labels = _load_corpus(config)
    table, tax, records = _load_resources(config, table_loader)
    selection = features.validate_selection(config.features)
    vectors = extract_feature_vectors(
        tokenized,
        table,
        tax,
        records,
        selection,
        config.pair_distance_scope,
        config.resolved_workers(),
    )
    cv = _cv_config(config)
    echo = config.to_dict()

    artifacts: list[Artifact] = []
    aggregates: list[dict] = []

    if "single" in config.experiments:
        reports = [
            run_single_feature_experiment(vectors, labels, name, cv, config_echo=echo)
            for name in selection
        ]
        artifacts.append(Artifact("single_feature_report.json", _report_json(reports, config)))
        aggregates += [
            {"experiment": "single_feature", "feature": r.feature, **r.aggregate}
            for r in reports
        ]

    if "content" in config.experiments:
        reports = []
        if config.content_baseline:
            reports.append(
                run_content_experiment(
                    table,
                    tokenized,
                    labels,
                    cv,
                    mode=config.content_embedding_mode,
                    config_echo=echo,
                )
            )
        for name in selection:
            reports.append(
                run_content_experiment(
                    table,
                    tokenized,
                    labels,
                    cv,
                    vectors=vectors,
                    feature_name=name,
                    mode=config.content_embedding_mode,
                    config_echo=echo,
                )
            )
        artifacts.append(Artifact("content_report.json", _report_json(reports, config)))
        aggregates += [
            {"experiment": "content", "feature": r.feature, **r.aggregate}
            for r in reports
        ]

    return EvaluateRunResult(aggregates=aggregates, artifacts=artifacts)


def run_histogram(
    config: RunConfig, table_loader: TableLoader = load_embeddings
) -> HistogramRunResult:
    """Per-class histogram table for the selected features."""
    config.validate()
    tokenized, labels = _load_corpus(config)
    table, tax, records = _load_resources(config, table_loader)
    selection = features.validate_selection(config.features)
    vectors = extract_feature_vectors(
        tokenized,
        table,
        tax,
        records,
        selection,
        config.pair_distance_scope,
        config.resolved_workers(),
    )
    rows = feature_histograms(vectors, labels, selection, config.bins)
    artifact = Artifact("histograms.tsv", histogram_table(rows))
    return HistogramRunResult(features=list(selection), artifacts=[artifact])


def analyze_pair(
    embeddings_path: str,
    setup: str,
    punchline: str,
    selection,
    taxonomy_path: Optional[str] = None,
    pair_scope: str = "text",
    table_loader: TableLoader = load_embeddings,
) -> dict:
    """Score one setup/punchline pair; language-model features need records
    and are not available on this path."""
    chosen = features.validate_selection(selection)
    blocked = [name for name in chosen if name in LM_FEATURES]
    if blocked:
        raise ConfigurationError(
            f"feature(s) {blocked} need a pre-computed record file and "
            "cannot be served for ad-hoc text"
        )
    table = table_loader(embeddings_path)
    tax = features.load_taxonomy(taxonomy_path) if taxonomy_path else None
    sample = corpus.tokenize_sample(corpus.JokeSample("adhoc", setup, punchline, 0))
    fv = features.extract_all(
        sample, table, tax, None, selection=chosen, pair_scope=pair_scope
    )
    return {"values": fv.values, "degenerate": sorted(fv.degeneracy_flags)}
