"""Cross-validated experiments: fold construction, macro metrics, runners.

Folds and repetitions are independent jobs; they may run on a thread pool,
but results are always reduced in (repetition, fold) order so reports are
identical regardless of scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import classify
from .classify import SvmConfig
from .embeddings import EmbeddingTable
from .errors import StratificationError, ValidationError
from .features import FeatureVector

METRIC_KEYS = ("precision", "recall", "f1", "accuracy")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_predictions(cls, y_true, y_pred, positive) -> "ConfusionMatrix":
        y_true = np.asarray(y_true)
        y_pred = np.asarray(y_pred)
        pos_true = y_true == positive
        pos_pred = y_pred == positive
        return cls(
            tp=int(np.sum(pos_true & pos_pred)),
            fp=int(np.sum(~pos_true & pos_pred)),
            fn=int(np.sum(pos_true & ~pos_pred)),
            tn=int(np.sum(~pos_true & ~pos_pred)),
        )


def _safe_ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def macro_metrics(cm_pos: ConfusionMatrix, cm_neg: ConfusionMatrix) -> dict[str, float]:
    """Unweighted two-class average of precision/recall/F1, plus accuracy.

    0/0 ratios are defined as 0 so degenerate folds stay well-defined.
    """
    if cm_pos.total == 0:
        raise ValidationError("empty confusion matrix")
    per_class = []
    for cm in (cm_pos, cm_neg):
        p = _safe_ratio(cm.tp, cm.tp + cm.fp)
        r = _safe_ratio(cm.tp, cm.tp + cm.fn)
        f1 = _safe_ratio(2.0 * p * r, p + r)
        per_class.append((p, r, f1))
    accuracy = (cm_pos.tp + cm_pos.tn) / cm_pos.total
    return {
        "precision": (per_class[0][0] + per_class[1][0]) / 2.0,
        "recall": (per_class[0][1] + per_class[1][1]) / 2.0,
        "f1": (per_class[0][2] + per_class[1][2]) / 2.0,
        "accuracy": accuracy,
    }


def stratified_kfold(labels, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic stratified partition: test folds are disjoint and cover
    all indices, with per-fold class counts within one of an even split."""
    labels = np.asarray(labels)
    if k < 2:
        raise StratificationError(f"k must be at least 2, got {k}")
    rng = np.random.default_rng(seed)
    fold_members: list[list[int]] = [[] for _ in range(k)]
    fold_sizes = [0] * k
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            raise StratificationError(
                f"class {cls!r} has {members.size} samples, fewer than k={k}"
            )
        members = members[rng.permutation(members.size)]
        base, extra = divmod(members.size, k)
        counts = [base] * k
        # Remainder samples land on the currently smallest folds so overall
        # fold sizes stay within one of each other across classes.
        for fold_index in sorted(range(k), key=lambda f: (fold_sizes[f], f))[:extra]:
            counts[fold_index] += 1
        cursor = 0
        for fold_index in range(k):
            fold_members[fold_index].extend(members[cursor : cursor + counts[fold_index]])
            fold_sizes[fold_index] += counts[fold_index]
            cursor += counts[fold_index]
    all_indices = np.arange(labels.size)
    folds = []
    for members in fold_members:
        test = np.sort(np.asarray(members, dtype=int))
        train = np.setdiff1d(all_indices, test, assume_unique=True)
        folds.append((train, test))
    return folds


def plain_kfold(labels, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Unstratified variant: one seeded shuffle dealt round-robin."""
    labels = np.asarray(labels)
    if k < 2 or labels.size < k:
        raise StratificationError(f"cannot split {labels.size} samples into k={k} folds")
    rng = np.random.default_rng(seed)
    order = rng.permutation(labels.size)
    all_indices = np.arange(labels.size)
    folds = []
    for fold_index in range(k):
        test = np.sort(order[fold_index::k])
        train = np.setdiff1d(all_indices, test, assume_unique=True)
        folds.append((train, test))
    return folds


@dataclass
class CvConfig:
    k: int = 10
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    stratified: bool = True
    svm: SvmConfig = field(default_factory=SvmConfig)
    workers: int = 1


@dataclass
class EvalReport:
    experiment: str
    feature: Optional[str]
    k: int
    seeds: tuple[int, ...]
    folds: list[dict]
    aggregate: dict[str, float]
    degeneracy_counts: dict[str, int] = field(default_factory=dict)
    config_echo: dict = field(default_factory=dict)

    @property
    def repetitions(self) -> int:
        return len(self.seeds)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "feature": self.feature,
            "k": self.k,
            "repetitions": self.repetitions,
            "seeds": list(self.seeds),
            "folds": self.folds,
            "aggregate": self.aggregate,
            "degeneracy_counts": self.degeneracy_counts,
            "config": self.config_echo,
        }


def cross_validate(x, labels01, config: CvConfig) -> tuple[list[dict], dict[str, float]]:
    """Repeated k-fold CV of the SVM over 0/1 labels; rows per (seed, fold)."""
    x = np.asarray(x, dtype=float)
    labels01 = np.asarray(labels01, dtype=int)
    y = np.where(labels01 == 1, 1.0, -1.0)
    splitter = stratified_kfold if config.stratified else plain_kfold

    jobs = []
    for rep_index, seed in enumerate(config.seeds):
        for fold_index, (train, test) in enumerate(splitter(labels01, config.k, seed)):
            jobs.append((rep_index, seed, fold_index, train, test))

    def run_job(job):
        rep_index, seed, fold_index, train, test = job
        # Derived seed keeps every (repetition, fold) trainer independent
        # yet fully reproducible.
        svm_config = SvmConfig(
            kernel=config.svm.kernel,
            c=config.svm.c,
            gamma=config.svm.gamma,
            tol=config.svm.tol,
            max_passes=config.svm.max_passes,
            seed=seed * 10007 + fold_index,
        )
        model = classify.fit(x[train], y[train], svm_config)
        predicted = classify.predict_batch(model, x[test])
        cm_pos = ConfusionMatrix.from_predictions(y[test], predicted, positive=1.0)
        cm_neg = ConfusionMatrix.from_predictions(y[test], predicted, positive=-1.0)
        metrics = macro_metrics(cm_pos, cm_neg)
        return {
            "repetition": rep_index,
            "seed": seed,
            "fold": fold_index,
            "test_size": int(test.size),
            **metrics,
        }

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(run_job, jobs))
    else:
        rows = [run_job(job) for job in jobs]
    rows.sort(key=lambda row: (row["repetition"], row["fold"]))
    aggregate = {
        key: float(np.mean([row[key] for row in rows])) for key in METRIC_KEYS
    }
    return rows, aggregate


def count_degeneracies(vectors: list[FeatureVector]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for fv in vectors:
        for name in fv.degeneracy_flags:
            counts[name] = counts.get(name, 0) + 1
    return dict(sorted(counts.items()))


def run_single_feature_experiment(
    vectors: list[FeatureVector],
    labels01,
    feature_name: str,
    config: CvConfig,
    config_echo: Optional[dict] = None,
) -> EvalReport:
    """One scalar feature through standardization, the SVM, and repeated CV."""
    missing = [fv.sample_id for fv in vectors if feature_name not in fv.values]
    if missing:
        raise ValidationError(
            f"feature {feature_name!r} missing for sample(s) {missing[:3]}"
        )
    x = np.array([[fv.values[feature_name]] for fv in vectors])
    rows, aggregate = cross_validate(x, labels01, config)
    return EvalReport(
        experiment="single_feature",
        feature=feature_name,
        k=config.k,
        seeds=tuple(config.seeds),
        folds=rows,
        aggregate=aggregate,
        degeneracy_counts=count_degeneracies(vectors),
        config_echo=config_echo or {},
    )


def content_matrix(
    table: EmbeddingTable,
    samples,
    vectors: Optional[list[FeatureVector]] = None,
    feature_name: Optional[str] = None,
    mode: str = "raw",
) -> tuple[np.ndarray, int]:
    """Mean-embedding blocks [setup | punchline], optionally plus one feature.

    Returns the matrix and the count of samples with a degenerate (all out of
    vocabulary) mean on either side.
    """
    if mode not in ("raw", "normalized"):
        raise ValidationError(f"content mode must be 'raw' or 'normalized', got {mode!r}")
    rows = []
    degenerate = 0
    for index, sample in enumerate(samples):
        blocks = []
        flagged = False
        for tokens in (sample.setup_tokens, sample.punchline_tokens):
            if mode == "raw":
                mean = table.mean_embedding(tokens)
                vector, is_degenerate = mean.vector, mean.degenerate
            else:
                states = [
                    s.vector
                    for s in (table.word_state(t) for t in tokens)
                    if s is not None
                ]
                if states:
                    vector, is_degenerate = np.mean(states, axis=0), False
                else:
                    vector, is_degenerate = np.zeros(table.dimension), True
            blocks.append(vector)
            flagged = flagged or is_degenerate
        if flagged:
            degenerate += 1
        if feature_name is not None:
            blocks.append([vectors[index].values[feature_name]])
        rows.append(np.concatenate(blocks))
    return np.asarray(rows), degenerate


def run_content_experiment(
    table: EmbeddingTable,
    samples,
    labels01,
    config: CvConfig,
    vectors: Optional[list[FeatureVector]] = None,
    feature_name: Optional[str] = None,
    mode: str = "raw",
    config_echo: Optional[dict] = None,
) -> EvalReport:
    """Mean-embedding classifier, optionally augmented with one scalar feature."""
    if feature_name is not None and vectors is None:
        raise ValidationError("feature augmentation requires extracted feature vectors")
    x, degenerate = content_matrix(table, samples, vectors, feature_name, mode)
    rows, aggregate = cross_validate(x, labels01, config)
    return EvalReport(
        experiment="content",
        feature=feature_name,
        k=config.k,
        seeds=tuple(config.seeds),
        folds=rows,
        aggregate=aggregate,
        degeneracy_counts={"content_mean": degenerate} if degenerate else {},
        config_echo=config_echo or {},
    )


@dataclass(frozen=True)
class HistogramRow:
    feature: str
    label: int
    bin_index: int
    bin_low: float
    bin_high: float
    proportion: float
    class_median: float


def feature_histograms(
    vectors: list[FeatureVector], labels01, feature_names, bins: int
) -> list[HistogramRow]:
    """Shared-edge per-class histograms with class medians.

    Proportions are per class and sum to 1; a constant feature occupies a
    single bin centered on its value.
    """
    if bins < 1:
        raise ValidationError(f"bins must be positive, got {bins}")
    labels01 = np.asarray(labels01, dtype=int)
    rows: list[HistogramRow] = []
    for name in feature_names:
        values = np.array([fv.values[name] for fv in vectors])
        low, high = float(values.min()), float(values.max())
        if high - low <= 1e-15:
            edges = np.array([low - 0.5, low + 0.5])
        else:
            edges = np.linspace(low, high, bins + 1)
        for label in (0, 1):
            class_values = values[labels01 == label]
            if class_values.size == 0:
                continue
            counts, _ = np.histogram(class_values, bins=edges)
            proportions = counts / class_values.size
            median = float(np.median(class_values))
            for bin_index, proportion in enumerate(proportions):
                rows.append(
                    HistogramRow(
                        feature=name,
                        label=label,
                        bin_index=bin_index,
                        bin_low=float(edges[bin_index]),
                        bin_high=float(edges[bin_index + 1]),
                        proportion=float(proportion),
                        class_median=median,
                    )
                )
    return rows


def histogram_table(rows: list[HistogramRow]) -> str:
    header = "feature\tlabel\tbin_index\tbin_low\tbin_high\tproportion\tclass_median"
    lines = [header]
    for row in rows:
        lines.append(
            f"{row.feature}\t{row.label}\t{row.bin_index}\t{row.bin_low!r}\t"
            f"{row.bin_high!r}\t{row.proportion!r}\t{row.class_median!r}"
        )
    return "\n".join(lines) + "\n"
