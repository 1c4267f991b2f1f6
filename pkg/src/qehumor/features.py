"""Per-sample scalar features for setup/punchline classification.

Two features come from the density-matrix representation:

* ``qe_uncertainty``: entropy of the setup's density matrix.
* ``qe_incongruity``: conditional entropy of the punchline's density matrix
  given the setup's; negative values are legitimate.

Five baselines: shortest-path concept similarity, maximum and minimum
embedding distance over word pairs, and two language-model statistics
(mean next-token entropy, mean surprisal) read from pre-computed record
files rather than produced here.
"""

from __future__ import annotations

import json
import math
import os
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .corpus import TokenizedSample
from .density import DensityMatrix, build_density
from .embeddings import EmbeddingTable
from .errors import (
    ConfigurationError,
    MissingRecordError,
    ParseError,
    ValidationError,
)
from .qentropy import conditional_quantum_entropy, von_neumann_entropy

FEATURE_NAMES = (
    "qe_uncertainty",
    "qe_incongruity",
    "sim_path",
    "disconnection",
    "repetition",
    "lm_uncertainty",
    "lm_surprisal",
)
LM_FEATURES = ("lm_uncertainty", "lm_surprisal")
PAIR_SCOPES = ("text", "setup", "punchline")


class FeatureResult(NamedTuple):
    value: float
    degenerate: bool = False


@dataclass(frozen=True)
class FeatureVector:
    sample_id: str
    values: dict[str, float]
    degeneracy_flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class TokenDistributionRecord:
    """Per-position statistics of a language model scoring a punchline.

    ``token_entropies[i]`` is the entropy (nats) of the model's vocabulary
    distribution at position i; ``token_logprobs[i]`` is the natural log
    probability the model assigned to the token actually observed there.
    """

    sample_id: str
    token_entropies: tuple[float, ...]
    token_logprobs: tuple[float, ...]

    def __post_init__(self):
        if len(self.token_entropies) != len(self.token_logprobs):
            raise ValidationError(
                f"record {self.sample_id!r}: entropy/logprob length mismatch"
            )
        if not self.token_entropies:
            raise ValidationError(f"record {self.sample_id!r}: empty token lists")
        if any(e < 0.0 for e in self.token_entropies):
            raise ValidationError(f"record {self.sample_id!r}: negative entropy")
        if any(lp > 0.0 for lp in self.token_logprobs):
            raise ValidationError(f"record {self.sample_id!r}: positive log-probability")


@dataclass
class TaxonomyGraph:
    """Undirected concept graph plus a word-to-concepts mapping."""

    adjacency: dict[str, set[str]] = field(default_factory=dict)
    word_to_concepts: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def add_edge(self, a: str, b: str) -> None:
        if a == b:
            raise ValidationError(f"self-loop on concept {a!r}")
        self.adjacency.setdefault(a, set()).add(b)
        self.adjacency.setdefault(b, set()).add(a)

    def add_word(self, word: str, concept: str) -> None:
        existing = self.word_to_concepts.get(word, ())
        if concept not in existing:
            self.word_to_concepts[word] = existing + (concept,)
        self.adjacency.setdefault(concept, set())

    def concepts_for(self, token: str) -> tuple[str, ...]:
        return self.word_to_concepts.get(token, ())

    def distances_from(self, start: str) -> dict[str, int]:
        """Breadth-first hop counts from ``start`` to every reachable concept."""
        if start not in self.adjacency:
            return {}
        dist = {start: 0}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for neighbor in self.adjacency[node]:
                if neighbor not in dist:
                    dist[neighbor] = dist[node] + 1
                    queue.append(neighbor)
        return dist


def load_taxonomy(path: str | os.PathLike) -> TaxonomyGraph:
    """Parse tab-separated taxonomy lines.

    Each line is ``edge<TAB>concept_a<TAB>concept_b`` or
    ``word<TAB>token<TAB>concept``; blank lines and ``#`` comments are skipped.
    """
    graph = TaxonomyGraph()
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[0] not in ("edge", "word"):
                raise ParseError(
                    f"{path}: line {lineno}: expected 'edge<TAB>a<TAB>b' or "
                    f"'word<TAB>w<TAB>c', got {line!r}"
                )
            kind, a, b = (p.strip() for p in parts)
            if not a or not b:
                raise ParseError(f"{path}: line {lineno}: empty field")
            try:
                if kind == "edge":
                    graph.add_edge(a, b)
                else:
                    graph.add_word(a, b)
            except ValidationError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    return graph


def read_lm_records(path: str | os.PathLike) -> dict[str, TokenDistributionRecord]:
    """Read one JSON record per line; a leading ``{"header": ...}`` line is metadata."""
    records: dict[str, TokenDistributionRecord] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            if "header" in obj:
                continue
            try:
                record = TokenDistributionRecord(
                    sample_id=str(obj["sample_id"]),
                    token_entropies=tuple(float(v) for v in obj["token_entropies"]),
                    token_logprobs=tuple(float(v) for v in obj["token_logprobs"]),
                )
            except KeyError as exc:
                raise ParseError(f"{path}: line {lineno}: missing field {exc}") from exc
            if record.sample_id in records:
                raise ParseError(
                    f"{path}: line {lineno}: duplicate sample_id {record.sample_id!r}"
                )
            records[record.sample_id] = record
    return records


def qe_uncertainty(setup_density: DensityMatrix) -> float:
    """Entropy of the setup representation; high values mean many semantic axes."""
    return von_neumann_entropy(setup_density)


def qe_incongruity(
    setup_density: DensityMatrix, punchline_density: DensityMatrix
) -> float:
    """Conditional entropy of the punchline given the setup."""
    return conditional_quantum_entropy(punchline_density, setup_density)


def path_similarity_feature(
    tax: TaxonomyGraph, setup_tokens, punchline_tokens
) -> FeatureResult:
    """Best shortest-path similarity 1/(1+D) over setup-punchline concept pairs."""
    setup_concepts = {c for t in setup_tokens for c in tax.concepts_for(t)}
    punchline_concepts = {c for t in punchline_tokens for c in tax.concepts_for(t)}
    if not setup_concepts or not punchline_concepts:
        return FeatureResult(0.0, degenerate=True)
    best: Optional[float] = None
    for c1 in sorted(setup_concepts):
        dist = tax.distances_from(c1)
        for c2 in punchline_concepts:
            d = dist.get(c2)
            if d is None:
                continue  # unreachable pairs contribute nothing
            sim = 1.0 / (1.0 + d)
            if best is None or sim > best:
                best = sim
    if best is None:
        return FeatureResult(0.0, degenerate=True)
    return FeatureResult(best, degenerate=False)


def _pairwise_distances(table: EmbeddingTable, tokens) -> Optional[np.ndarray]:
    states = [s.vector for s in (table.word_state(t) for t in tokens) if s is not None]
    if len(states) < 2:
        return None
    w = np.asarray(states)
    gram = w @ w.T
    i, j = np.triu_indices(len(states), k=1)
    # Cosine distance of unit vectors lives in [0, 2]; clip round-off.
    return np.clip(1.0 - gram[i, j], 0.0, 2.0)


def disconnection(table: EmbeddingTable, tokens) -> FeatureResult:
    """Maximum cosine distance over word pairs in the token list."""
    distances = _pairwise_distances(table, tokens)
    if distances is None:
        return FeatureResult(0.0, degenerate=True)
    return FeatureResult(float(distances.max()), degenerate=False)


def repetition(table: EmbeddingTable, tokens) -> FeatureResult:
    """Minimum cosine distance over word pairs; repeated words force 0."""
    distances = _pairwise_distances(table, tokens)
    if distances is None:
        return FeatureResult(0.0, degenerate=True)
    return FeatureResult(float(distances.min()), degenerate=False)


def lm_uncertainty(rec: TokenDistributionRecord) -> float:
    """Mean per-position vocabulary entropy over the punchline."""
    if not rec.token_entropies:
        raise ValidationError(f"record {rec.sample_id!r}: empty token lists")
    return float(np.mean(rec.token_entropies))


def lm_surprisal(rec: TokenDistributionRecord) -> float:
    """Mean negative log probability of the punchline tokens."""
    if not rec.token_logprobs:
        raise ValidationError(f"record {rec.sample_id!r}: empty token lists")
    return float(-np.mean(rec.token_logprobs))


def validate_selection(selection) -> tuple[str, ...]:
    chosen = tuple(selection)
    unknown = [name for name in chosen if name not in FEATURE_NAMES]
    if unknown:
        raise ConfigurationError(
            f"unknown feature(s) {unknown}; known: {list(FEATURE_NAMES)}"
        )
    if len(set(chosen)) != len(chosen):
        raise ConfigurationError(f"duplicate feature names in selection: {chosen}")
    # Canonical order keeps downstream tables and vectors deterministic.
    return tuple(name for name in FEATURE_NAMES if name in chosen)


def extract_all(
    sample: TokenizedSample,
    table: EmbeddingTable,
    tax: Optional[TaxonomyGraph] = None,
    lm_records: Optional[dict[str, TokenDistributionRecord]] = None,
    selection=FEATURE_NAMES,
    pair_scope: str = "text",
) -> FeatureVector:
    """Compute exactly the selected features for one sample."""
    selection = validate_selection(selection)
    if pair_scope not in PAIR_SCOPES:
        raise ConfigurationError(
            f"pair_scope must be one of {PAIR_SCOPES}, got {pair_scope!r}"
        )
    setup_tokens = list(sample.setup_tokens)
    punchline_tokens = list(sample.punchline_tokens)
    scope_tokens = {
        "text": setup_tokens + punchline_tokens,
        "setup": setup_tokens,
        "punchline": punchline_tokens,
    }[pair_scope]

    values: dict[str, float] = {}
    flags: set[str] = set()
    setup_density: Optional[DensityMatrix] = None
    punchline_density: Optional[DensityMatrix] = None

    for name in selection:
        if name == "qe_uncertainty":
            setup_density = setup_density or build_density(table, setup_tokens)
            values[name] = qe_uncertainty(setup_density)
            if setup_density.degenerate:
                flags.add(name)
        elif name == "qe_incongruity":
            setup_density = setup_density or build_density(table, setup_tokens)
            punchline_density = punchline_density or build_density(
                table, punchline_tokens
            )
            values[name] = qe_incongruity(setup_density, punchline_density)
            if setup_density.degenerate or punchline_density.degenerate:
                flags.add(name)
        elif name == "sim_path":
            if tax is None:
                raise ConfigurationError(
                    "feature 'sim_path' requires a taxonomy (--taxonomy)"
                )
            result = path_similarity_feature(tax, setup_tokens, punchline_tokens)
            values[name] = result.value
            if result.degenerate:
                flags.add(name)
        elif name in ("disconnection", "repetition"):
            op = disconnection if name == "disconnection" else repetition
            result = op(table, scope_tokens)
            values[name] = result.value
            if result.degenerate:
                flags.add(name)
        else:  # lm features
            if lm_records is None:
                raise ConfigurationError(
                    f"feature {name!r} requires a record file (--lm-records)"
                )
            record = lm_records.get(sample.id)
            if record is None:
                raise MissingRecordError(
                    f"no language-model record for sample {sample.id!r}"
                )
            values[name] = (
                lm_uncertainty(record) if name == "lm_uncertainty" else lm_surprisal(record)
            )

    for name, value in values.items():
        if not math.isfinite(value):
            raise ValidationError(
                f"sample {sample.id!r}: feature {name!r} is not finite ({value!r})"
            )
    return FeatureVector(sample.id, values, frozenset(flags))
