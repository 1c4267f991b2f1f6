"""Soft-margin binary SVM trained by sequential minimal optimization.

Inputs are z-scored with statistics fitted on the training set only, so the
model carries its own standardization and raw feature scales never leak into
kernel geometry. The SMO loop follows the classic two-level scheme: a working
index i is taken from seeded shuffled sweeps (alternating between all points
and the non-bound subset), its partner j by largest error difference with
shuffled fallbacks. Kernel values are fully precomputed; datasets here are a
few thousand rows at most.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, TrainingError, ValidationError

SWEEP_HARD_CAP = 1000


@dataclass(frozen=True)
class StandardizationStats:
    mean: np.ndarray
    std: np.ndarray  # exact 0 marks a constant dimension

    @classmethod
    def fit(cls, x: np.ndarray) -> "StandardizationStats":
        return cls(mean=x.mean(axis=0), std=x.std(axis=0))

    def transform(self, x: np.ndarray) -> np.ndarray:
        scale = np.where(self.std > 0.0, self.std, 1.0)
        out = (x - self.mean) / scale
        # Constant dimensions carry no information; pass them through as 0.
        out[..., self.std == 0.0] = 0.0
        return out


@dataclass(frozen=True)
class SvmConfig:
    kernel: str = "rbf"  # "linear" or "rbf"
    c: float = 1.0
    gamma: Optional[float] = None  # None: 1 / (n_features * var) on z-scored data
    tol: float = 1e-3
    max_passes: int = 10
    seed: int = 0


@dataclass
class SvmModel:
    kernel: str
    gamma: Optional[float]
    c: float
    support_vectors: np.ndarray  # rows in standardized space
    dual_coef: np.ndarray  # alpha_i * y_i per support vector
    bias: float
    stats: StandardizationStats
    config: SvmConfig = field(default_factory=SvmConfig)

    @property
    def dimension(self) -> int:
        return self.support_vectors.shape[1]


def _kernel_matrix(kind: str, gamma, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return a @ b.T
    if kind == "rbf":
        sq = (
            np.sum(a * a, axis=1)[:, None]
            + np.sum(b * b, axis=1)[None, :]
            - 2.0 * (a @ b.T)
        )
        return np.exp(-gamma * np.clip(sq, 0.0, None))
    raise ValidationError(f"unknown kernel {kind!r}; expected 'linear' or 'rbf'")


def _resolve_gamma(config: SvmConfig, xs: np.ndarray) -> Optional[float]:
    if config.kernel != "rbf":
        return None
    if config.gamma is not None:
        return config.gamma
    variance = float(xs.var())
    if variance <= 0.0:
        variance = 1.0
    return 1.0 / (xs.shape[1] * variance)


def fit(x, y, config: SvmConfig = SvmConfig()) -> SvmModel:
    """Train by SMO; the returned model keeps only rows with alpha > 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if x.ndim != 2:
        raise DimensionError(f"expected a 2-d sample matrix, got shape {x.shape}")
    if x.shape[0] != y.shape[0]:
        raise DimensionError(f"{x.shape[0]} rows vs {y.shape[0]} labels")
    if not np.all(np.isfinite(y)):
        raise ValidationError("labels contain non-finite values")
    bad = ~np.all(np.isfinite(x), axis=0)
    if np.any(bad):
        raise ValidationError(
            f"non-finite feature values in dimension(s) {np.flatnonzero(bad).tolist()}"
        )
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValidationError("labels must be -1 or +1")
    if np.unique(y).size < 2:
        raise TrainingError("training data contains a single class")

    stats = StandardizationStats.fit(x)
    xs = stats.transform(x)
    gamma = _resolve_gamma(config, xs)
    n = xs.shape[0]
    k = _kernel_matrix(config.kernel, gamma, xs, xs)

    c = float(config.c)
    tol = float(config.tol)
    alpha = np.zeros(n)
    bias = 0.0
    # Error cache E_i = f(x_i) - y_i; with all alphas zero, f = 0.
    errors = -y.copy()
    rng = np.random.default_rng(config.seed)

    def take_step(i: int, j: int) -> bool:
        nonlocal bias, errors
        if i == j:
            return False
        a_i, a_j = alpha[i], alpha[j]
        y_i, y_j = y[i], y[j]
        e_i, e_j = errors[i], errors[j]
        if y_i == y_j:
            low, high = max(0.0, a_i + a_j - c), min(c, a_i + a_j)
        else:
            low, high = max(0.0, a_j - a_i), min(c, c + a_j - a_i)
        if low >= high:
            return False
        eta = k[i, i] + k[j, j] - 2.0 * k[i, j]
        if eta <= 0.0:
            return False  # coincident points; no curvature along this pair
        a_j_new = a_j + y_j * (e_i - e_j) / eta
        a_j_new = min(max(a_j_new, low), high)
        if abs(a_j_new - a_j) < 1e-12 * (a_j_new + a_j + 1e-12):
            return False
        a_i_new = a_i + y_i * y_j * (a_j - a_j_new)

        d_i = y_i * (a_i_new - a_i)
        d_j = y_j * (a_j_new - a_j)
        b_i = bias - e_i - d_i * k[i, i] - d_j * k[i, j]
        b_j = bias - e_j - d_i * k[i, j] - d_j * k[j, j]
        if 0.0 < a_i_new < c:
            new_bias = b_i
        elif 0.0 < a_j_new < c:
            new_bias = b_j
        else:
            new_bias = (b_i + b_j) / 2.0

        errors += d_i * k[i] + d_j * k[j] + (new_bias - bias)
        alpha[i], alpha[j] = a_i_new, a_j_new
        bias = new_bias
        return True

    def examine(i: int) -> bool:
        e_i = errors[i]
        r = e_i * y[i]
        if not ((r < -tol and alpha[i] < c) or (r > tol and alpha[i] > 0.0)):
            return False
        non_bound = np.flatnonzero((alpha > 0.0) & (alpha < c))
        if non_bound.size > 1:
            j = int(non_bound[np.argmax(np.abs(e_i - errors[non_bound]))])
            if take_step(i, j):
                return True
        for j in rng.permutation(non_bound):
            if take_step(i, int(j)):
                return True
        for j in rng.permutation(n):
            if take_step(i, int(j)):
                return True
        return False

    examine_all = True
    quiet_sweeps = 0
    sweeps = 0
    while quiet_sweeps < config.max_passes and sweeps < SWEEP_HARD_CAP:
        sweeps += 1
        if examine_all:
            indices = rng.permutation(n)
        else:
            indices = rng.permutation(np.flatnonzero((alpha > 0.0) & (alpha < c)))
        changed = sum(examine(int(i)) for i in indices)
        if examine_all:
            if changed == 0:
                break  # a clean full sweep is conclusive: KKT holds within tol
            examine_all = False
        elif changed == 0:
            examine_all = True
        quiet_sweeps = quiet_sweeps + 1 if changed == 0 else 0
    else:
        if sweeps >= SWEEP_HARD_CAP:
            raise TrainingError(f"SMO did not settle within {SWEEP_HARD_CAP} sweeps")

    keep = alpha > 0.0
    return SvmModel(
        kernel=config.kernel,
        gamma=gamma,
        c=c,
        support_vectors=xs[keep],
        dual_coef=alpha[keep] * y[keep],
        bias=float(bias),
        stats=stats,
        config=config,
    )


def decision_values(model: SvmModel, x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != model.dimension:
        raise DimensionError(
            f"input has {x.shape[1]} features, model expects {model.dimension}"
        )
    xs = model.stats.transform(x)
    if model.support_vectors.shape[0] == 0:
        return np.full(x.shape[0], model.bias)
    k = _kernel_matrix(model.kernel, model.gamma, xs, model.support_vectors)
    return k @ model.dual_coef + model.bias


def predict(model: SvmModel, x) -> tuple[int, float]:
    """Label in {-1, +1} (ties resolve to +1) and the raw decision value."""
    value = float(decision_values(model, np.asarray(x, dtype=float)[None, :])[0])
    return (1 if value >= 0.0 else -1), value


def predict_batch(model: SvmModel, x) -> np.ndarray:
    values = decision_values(model, x)
    return np.where(values >= 0.0, 1.0, -1.0)


def concat_content(features, setup_mean, punchline_mean, selection) -> np.ndarray:
    """[setup mean | punchline mean | one scalar feature], in that fixed order."""
    chosen = tuple(selection)
    if len(chosen) != 1:
        raise ValidationError(
            f"content concatenation takes exactly one feature, got {len(chosen)}"
        )
    name = chosen[0]
    if name not in features.values:
        raise ValidationError(f"feature {name!r} missing from vector {features.sample_id!r}")
    return np.concatenate(
        [
            np.asarray(setup_mean, dtype=float),
            np.asarray(punchline_mean, dtype=float),
            [features.values[name]],
        ]
    )


def save_model(model: SvmModel, path: str | os.PathLike) -> None:
    payload = {
        "kernel": model.kernel,
        "gamma": model.gamma,
        "c": model.c,
        "bias": model.bias,
        "support_vectors": model.support_vectors.tolist(),
        "dual_coef": model.dual_coef.tolist(),
        "stats": {"mean": model.stats.mean.tolist(), "std": model.stats.std.tolist()},
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=1)
        handle.write("\n")


def load_model(path: str | os.PathLike) -> SvmModel:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    dim = len(payload["stats"]["mean"])
    return SvmModel(
        kernel=payload["kernel"],
        gamma=payload["gamma"],
        c=payload["c"],
        support_vectors=np.array(payload["support_vectors"], dtype=float).reshape(-1, dim),
        dual_coef=np.asarray(payload["dual_coef"], dtype=float),
        bias=payload["bias"],
        stats=StandardizationStats(
            mean=np.asarray(payload["stats"]["mean"], dtype=float),
            std=np.asarray(payload["stats"]["std"], dtype=float),
        ),
    )
