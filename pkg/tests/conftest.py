import json
import math
from pathlib import Path

import numpy as np
import pytest

from qehumor.corpus import load_dataset, tokenize

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_DATASET = DATA_DIR / "dataset_40.tsv"


def dataset_vocabulary():
    vocab = set()
    for sample in load_dataset(FIXTURE_DATASET):
        vocab.update(tokenize(sample.setup))
        vocab.update(tokenize(sample.punchline))
    return sorted(vocab)


def write_embedding_file(path, vocabulary, dimension, seed):
    rng = np.random.default_rng(seed)
    with open(path, "w", encoding="utf-8") as handle:
        for token in vocabulary:
            vector = rng.standard_normal(dimension)
            handle.write(token + " " + " ".join(f"{v:.6f}" for v in vector) + "\n")
    return path


@pytest.fixture(scope="session")
def fixture_dataset_path():
    return str(FIXTURE_DATASET)


@pytest.fixture(scope="session")
def embeddings_path(tmp_path_factory):
    """16-dimensional table covering the whole fixture vocabulary."""
    path = tmp_path_factory.mktemp("resources") / "embeddings_16d.txt"
    return str(write_embedding_file(path, dataset_vocabulary(), 16, seed=101))


@pytest.fixture(scope="session")
def embeddings_50d_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("resources50") / "embeddings_50d.txt"
    return str(write_embedding_file(path, dataset_vocabulary(), 50, seed=202))


@pytest.fixture(scope="session")
def taxonomy_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("taxonomy") / "taxonomy.tsv"
    lines = [
        "edge\tc.object\tc.food",
        "edge\tc.object\tc.vehicle",
        "edge\tc.food\tc.cheese",
        "edge\tc.food\tc.bread",
        "edge\tc.vehicle\tc.bicycle",
        "edge\tc.vehicle\tc.train",
        "edge\tc.place\tc.library",
        "edge\tc.place\tc.museum",
        "edge\tc.object\tc.place",
        "word\tcheese\tc.cheese",
        "word\tnacho\tc.cheese",
        "word\tbread\tc.bread",
        "word\tbakery\tc.bread",
        "word\tbicycle\tc.bicycle",
        "word\ttrain\tc.train",
        "word\tlibrary\tc.library",
        "word\tlibrarian\tc.library",
        "word\tmuseum\tc.museum",
        "word\tnoodle\tc.food",
        "word\tcoffee\tc.food",
        "word\ttomato\tc.food",
        "word\ttomatoes\tc.food",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture(scope="session")
def lm_records_path(tmp_path_factory):
    """Structurally valid records for every fixture sample id."""
    rng = np.random.default_rng(303)
    path = tmp_path_factory.mktemp("records") / "records.jsonl"
    samples = load_dataset(FIXTURE_DATASET)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps({"header": {"model": "stub", "separator": "none"}}) + "\n")
        for sample in samples:
            length = max(1, len(tokenize(sample.punchline)))
            entropies = rng.uniform(0.5, 4.0, size=length)
            logprobs = -rng.uniform(0.1, 6.0, size=length)
            handle.write(
                json.dumps(
                    {
                        "sample_id": sample.id,
                        "token_entropies": [round(float(v), 6) for v in entropies],
                        "token_logprobs": [round(float(v), 6) for v in logprobs],
                    }
                )
                + "\n"
            )
    return str(path)


@pytest.fixture(scope="session")
def run_config_dict(fixture_dataset_path, embeddings_path, taxonomy_path, lm_records_path):
    """Small but complete configuration for end-to-end runs."""
    return {
        "dataset": fixture_dataset_path,
        "embeddings": embeddings_path,
        "taxonomy": taxonomy_path,
        "lm_records": lm_records_path,
        "features": ["qe_uncertainty", "qe_incongruity"],
        "k": 4,
        "repetitions": 2,
        "workers": 1,
    }


def entropy_upper_bound(length, dimension):
    return math.log(min(max(length, 1), dimension))
