"""Word-embedding table with unit-normalized word states and mean vectors.

The file format is the common plain-text one: `token v1 v2 ... vn` per line,
whitespace separated. The table keeps raw vectors; `word_state` normalizes on
access (normalization of a zero vector is undefined, so all-zero rows are
dropped at load time with a warning count).
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import FormatError, ParseError

log = logging.getLogger(__name__)

UNIT_NORM_ATOL = 1e-10


class WordState(NamedTuple):
    token: str
    vector: np.ndarray  # unit Euclidean norm


class MeanEmbedding(NamedTuple):
    vector: np.ndarray
    degenerate: bool


@dataclass
class EmbeddingTable:
    dimension: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)
    dropped_zero_vectors: int = 0

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def raw_vector(self, token: str) -> Optional[np.ndarray]:
        return self.entries.get(token)

    def word_state(self, token: str) -> Optional[WordState]:
        """Unit-normalized vector for ``token``, or None when out of vocabulary."""
        raw = self.entries.get(token)
        if raw is None:
            return None
        return WordState(token, raw / np.linalg.norm(raw))

    def mean_embedding(self, tokens) -> MeanEmbedding:
        """Arithmetic mean of the raw vectors of in-vocabulary tokens.

        All tokens out of vocabulary (or an empty list) degenerates to the
        zero vector, flagged.
        """
        found = [self.entries[t] for t in tokens if t in self.entries]
        if not found:
            return MeanEmbedding(np.zeros(self.dimension), degenerate=True)
        return MeanEmbedding(np.mean(found, axis=0), degenerate=False)


def load_embeddings(path: str | os.PathLike) -> EmbeddingTable:
    dimension: Optional[int] = None
    entries: dict[str, np.ndarray] = {}
    dropped = 0
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            parts = line.split()
            if not parts:
                continue
            token, raw_values = parts[0], parts[1:]
            if dimension is None:
                dimension = len(raw_values)
                if dimension == 0:
                    raise FormatError(f"{path}: line {lineno}: no vector components")
            if len(raw_values) != dimension:
                raise FormatError(
                    f"{path}: line {lineno}: expected {dimension} components, "
                    f"got {len(raw_values)}"
                )
            try:
                vector = np.array([float(v) for v in raw_values])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
            if token in entries:
                continue  # first occurrence wins
            if not np.any(vector):
                dropped += 1
                continue
            entries[token] = vector
    if dropped:
        log.warning("%s: dropped %d all-zero embedding row(s)", path, dropped)
    log.info("loaded %d embeddings of dimension %s from %s", len(entries), dimension, path)
    return EmbeddingTable(dimension or 0, entries, dropped_zero_vectors=dropped)
