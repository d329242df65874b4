import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from domainknn.kb_store import CorpusDocument, KnowledgeBase  # noqa: E402
from domainknn.text_pipeline import PipelineConfig  # noqa: E402
from domainknn.vectorspace import SparseVector, Vocabulary  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fixture_docs():
    from domainknn.kb_store import read_corpus

    return read_corpus(DATA / "fixture_corpus.jsonl")


@pytest.fixture
def bare_pipeline():
    """No stopwords, no lemmas: text maps to its tokens unchanged."""
    return PipelineConfig()


def random_sparse(rng, dim, density=0.3, integer=True, nonzero=False):
    dense = rng.random(dim) < density
    values = rng.integers(1, 6, dim) if integer else rng.random(dim) * 5 + 1e-3
    vec = np.where(dense, values, 0).astype(float)
    if nonzero and not vec.any():
        vec[rng.integers(dim)] = values[0]
    return SparseVector.from_dense(vec)


def kb_from_dense(rows, labels, n_classes=None):
    """Wrap raw vectors as a knowledge base over placeholder terms t000, t001, ..."""
    rows = [np.asarray(r, float) for r in rows]
    dim = len(rows[0]) if rows else 1
    n_classes = n_classes or (max(labels) + 1 if labels else 1)
    return KnowledgeBase(
        vocabulary=Vocabulary(tuple(f"t{i:03d}" for i in range(dim))),
        rows=tuple(SparseVector.from_dense(r) for r in rows),
        labels=tuple(labels),
        categories=tuple(f"c{i:02d}" for i in range(n_classes)),
        fingerprint=PipelineConfig().fingerprint,
    )
