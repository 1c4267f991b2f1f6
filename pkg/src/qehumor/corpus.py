"""Labeled setup/punchline dataset ingestion and deterministic tokenization.

Dataset files are UTF-8 delimited text (TSV or CSV) with a header row naming
the columns id, setup, punchline, label. Labels are binary: 1 for humor,
0 for non-humor.
"""

from __future__ import annotations

import csv
import logging
import os
import re
from dataclasses import dataclass

from .errors import ParseError, SchemaError, ValidationError

log = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("id", "setup", "punchline", "label")

# Maximal runs of alphanumeric characters, lowercased. Underscore is a word
# character for the regex engine but not alphanumeric, hence the exclusion.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class JokeSample:
    id: str
    setup: str
    punchline: str
    label: int


@dataclass(frozen=True)
class TokenizedSample:
    id: str
    setup_tokens: tuple[str, ...]
    punchline_tokens: tuple[str, ...]
    label: int


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


def tokenize_sample(sample: JokeSample) -> TokenizedSample:
    return TokenizedSample(
        id=sample.id,
        setup_tokens=tuple(tokenize(sample.setup)),
        punchline_tokens=tuple(tokenize(sample.punchline)),
        label=sample.label,
    )


def _delimiter(fmt: str) -> str:
    if fmt == "tsv":
        return "\t"
    if fmt == "csv":
        return ","
    raise ValueError(f"unknown dataset format {fmt!r}; expected 'tsv' or 'csv'")


def infer_format(path: str | os.PathLike) -> str:
    return "csv" if str(path).lower().endswith(".csv") else "tsv"


def load_dataset(path: str | os.PathLike, fmt: str | None = None) -> list[JokeSample]:
    """Parse one JokeSample per data row, preserving file order."""
    fmt = fmt or infer_format(path)
    samples: list[JokeSample] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle, delimiter=_delimiter(fmt))
        header = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise SchemaError(f"{path}: missing column {column!r}")
        for rownum, row in enumerate(reader, start=2):
            raw_label = (row["label"] or "").strip()
            if raw_label not in ("0", "1"):
                raise ParseError(
                    f"{path}: row {rownum}: label must be 0 or 1, got {raw_label!r}"
                )
            sample_id = (row["id"] or "").strip()
            setup = (row["setup"] or "").strip()
            punchline = (row["punchline"] or "").strip()
            if not setup:
                raise ValidationError(f"{path}: sample {sample_id!r}: empty setup")
            if not punchline:
                raise ValidationError(f"{path}: sample {sample_id!r}: empty punchline")
            samples.append(JokeSample(sample_id, setup, punchline, int(raw_label)))
    log.info("loaded %d samples from %s", len(samples), path)
    return samples


def write_dataset(samples, path: str | os.PathLike, fmt: str | None = None) -> None:
    fmt = fmt or infer_format(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter=_delimiter(fmt))
        writer.writerow(REQUIRED_COLUMNS)
        for s in samples:
            writer.writerow([s.id, s.setup, s.punchline, s.label])
