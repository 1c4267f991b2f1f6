"""Sentence density matrices: uniform mixtures of word-state projectors.

A sentence with in-vocabulary unit word vectors w_1..w_l is represented by
the n-by-n matrix (1/l) * sum_i w_i w_i^T. The result is symmetric, positive
semi-definite, has trace one, and rank at most min(l, n). A sentence with no
in-vocabulary word degenerates to the maximally mixed state I/n, flagged so
downstream consumers can count and report it.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingTable
from .linalg import PSD_EIG_FLOOR, SYMMETRY_RTOL, as_square_matrix, eig_sym

TRACE_ATOL = 1e-10
RANK_EIG_CUTOFF = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    source_length: int
    degenerate: bool = False

    @property
    def order(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DensityReport:
    trace_residual: float
    min_eigenvalue: float
    symmetry_residual: float
    rank_estimate: int
    passed: bool


def build_density(table: EmbeddingTable, tokens) -> DensityMatrix:
    """Uniform mixture of projectors onto the word states of ``tokens``.

    Repeated tokens contribute once per occurrence; out-of-vocabulary tokens
    are skipped. With no usable token the maximally mixed state I/n is
    returned with ``degenerate=True``.
    """
    n = table.dimension
    states = [s.vector for s in (table.word_state(t) for t in tokens) if s is not None]
    if not states:
        return DensityMatrix(np.eye(n) / n, 0, degenerate=True)
    w = np.asarray(states)
    rho = w.T @ w / len(states)
    rho = (rho + rho.T) / 2.0
    return DensityMatrix(rho, len(states))


def validate_density(d: DensityMatrix) -> DensityReport:
    """Diagnostic check of the density-matrix invariants; never raises."""
    m = as_square_matrix(d.matrix)
    n = m.shape[0]
    trace_residual = abs(float(np.trace(m)) - 1.0)
    gap = np.abs(m - m.T)
    symmetry_residual = float(gap.max(initial=0.0))
    symmetric = bool(np.all(gap <= SYMMETRY_RTOL * np.maximum(1.0, np.abs(m))))
    spectrum = eig_sym((m + m.T) / 2.0)
    min_eigenvalue = float(spectrum.eigenvalues.min(initial=0.0))
    rank_estimate = int(np.sum(spectrum.eigenvalues > RANK_EIG_CUTOFF))
    # The rank bound only applies to matrices built from words; the degenerate
    # sentinel I/n deliberately has full rank with source_length 0.
    rank_ok = d.source_length < 1 or rank_estimate <= min(d.source_length, n)
    passed = (
        trace_residual <= TRACE_ATOL
        and symmetric
        and min_eigenvalue >= PSD_EIG_FLOOR
        and rank_ok
    )
    return DensityReport(
        trace_residual=trace_residual,
        min_eigenvalue=min_eigenvalue,
        symmetry_residual=symmetry_residual,
        rank_estimate=rank_estimate,
        passed=passed,
    )


def dump_density(d: DensityMatrix, stream: io.TextIOBase | None = None) -> str:
    """Row-major text dump, n lines of n numbers; debugging aid."""
    lines = ["\t".join(repr(float(v)) for v in row) for row in d.matrix]
    text = "\n".join(lines) + "\n"
    if stream is not None:
        stream.write(text)
    return text
