"""Sentence domain classification by brute-force k-NN over a bag-of-words knowledge base."""

from .errors import DomainKnnError
from .kb_store import CorpusDocument, KnowledgeBase, build_kb, load_kb, read_corpus, save_kb
from .knn_engine import (
    ClassificationResult,
    ClassifyConfig,
    Neighbor,
    classify,
    pairwise_distance_matrix,
    query,
    vote,
)
from .metrics import Metric, distance
from .text_pipeline import PipelineConfig, default_pipeline, preprocess
from .vectorspace import SparseVector, Vocabulary, extend_query, vectorize

__version__ = "0.1.0"

__all__ = [
    "DomainKnnError",
    "CorpusDocument",
    "KnowledgeBase",
    "build_kb",
    "load_kb",
    "read_corpus",
    "save_kb",
    "ClassificationResult",
    "ClassifyConfig",
    "Neighbor",
    "classify",
    "pairwise_distance_matrix",
    "query",
    "vote",
    "Metric",
    "distance",
    "PipelineConfig",
    "default_pipeline",
    "preprocess",
    "SparseVector",
    "Vocabulary",
    "extend_query",
    "vectorize",
]
