"""Brute-force k-nearest-neighbor search and domain classification.

Every query scores all knowledge-base rows. With ``workers > 1`` the rows
are split into contiguous partitions scanned on a thread pool (the kernels
release the GIL); each partition keeps its local top-k and the partials are
merged by ``(distance, row_index)``. Row distances do not depend on the
partitioning, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ConfigInvalid, EmptyKnowledgeBase, FingerprintMismatch, KTooLarge, ZeroVector
from .kb_store import KnowledgeBase
from .metrics import Metric, parse_metric, scan_rows
from .text_pipeline import PipelineConfig, default_pipeline, preprocess
from .vectorspace import DEFAULT_PENALTY, SparseVector, extend_query

__all__ = [
    "DEFAULT_THRESHOLD",
    "Neighbor",
    "ClassifyConfig",
    "ClassificationResult",
    "row_distances",
    "select_nearest",
    "query",
    "vote",
    "classify",
    "pairwise_distance_matrix",
]

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class Neighbor:
    row_index: int
    label: int
    distance: float


@dataclass(frozen=True)
class ClassifyConfig:
    metric: Metric = Metric.COSINE
    k: int = 1
    threshold: float = DEFAULT_THRESHOLD
    penalty_factor: float = DEFAULT_PENALTY
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "metric", parse_metric(self.metric))
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
            raise ConfigInvalid(f"k must be a positive integer, got {self.k!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigInvalid(f"threshold must lie in [0, 1], got {self.threshold!r}")
        if not (self.penalty_factor > 0 and math.isfinite(self.penalty_factor)):
            raise ConfigInvalid(f"penalty factor must be positive, got {self.penalty_factor!r}")
        if self.workers < 1:
            raise ConfigInvalid(f"workers must be >= 1, got {self.workers!r}")


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of classifying one sentence.

    ``similarity_value`` is ``1 - min cosine distance`` and is only filled
    when ranking by cosine; ``min_distance`` is the nearest distance under the
    ranking metric. ``in_domain`` is always decided on the cosine distance.
    An unclassifiable input (nothing left after preprocessing) has
    ``label=None`` and an all-zero ``knn_result``.
    """

    similarity_value: float | None
    label: int | None
    knn_result: tuple[float, ...]
    in_domain: bool
    neighbors: tuple[Neighbor, ...] = ()
    metric: Metric = Metric.COSINE
    k: int = 1
    min_distance: float | None = None
    min_cosine_distance: float | None = None
    category: str | None = None

    @property
    def classified(self) -> bool:
        return self.label is not None

    def to_json_dict(self) -> dict:
        return {
            "similarityValue": self.similarity_value,
            "knnResult": list(self.knn_result),
            "label": self.label,
            "category": self.category,
            "inDomain": self.in_domain,
            "metric": self.metric.value,
            "k": self.k,
            "minDistance": self.min_distance,
        }


@lru_cache(maxsize=None)
def _executor(workers: int) -> ThreadPoolExecutor:
    return ThreadPoolExecutor(max_workers=workers, thread_name_prefix="knn")


def _partitions(n: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, n))
    bounds = np.linspace(0, n, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _check_query(kb: KnowledgeBase, q: SparseVector, metric: Metric) -> None:
    if len(kb) == 0:
        raise EmptyKnowledgeBase("knowledge base has no rows")
    if q.dimension < kb.dimension:
        raise ConfigInvalid(
            f"query dimension {q.dimension} is below the KB dimension {kb.dimension}"
        )
    if metric is Metric.COSINE and q.nnz == 0:
        raise ZeroVector("cosine distance is undefined for a zero query")


def row_distances(
    kb: KnowledgeBase, q: SparseVector, metric: "Metric | str" = Metric.COSINE, workers: int = 1
) -> np.ndarray:
    """Distance from *q* to every row, rows zero-padded to ``q.dimension``.

    Padding only appends zero coordinates, which the sparse kernels never
    store, so rows are scanned in place.
    """
    metric = parse_metric(metric)
    _check_query(kb, q, metric)
    indptr, indices, data = kb.csr
    qi, qv = q.arrays
    out = np.empty(len(kb))
    parts = _partitions(len(kb), workers)
    if len(parts) == 1:
        scan_rows(metric.code, indptr, indices, data, qi, qv, 0, len(kb), out)
    else:
        futures = [
            _executor(workers).submit(scan_rows, metric.code, indptr, indices, data, qi, qv, a, b, out)
            for a, b in parts
        ]
        for f in futures:
            f.result()
    return out


def select_nearest(dist: np.ndarray, k: int, start: int = 0) -> list[tuple[float, int]]:
    """The *k* smallest ``(distance, index)`` pairs, ordered by distance then index."""
    n = dist.shape[0]
    if k >= n:
        cand = np.arange(n)
    else:
        kth = np.partition(dist, k - 1)[k - 1]
        cand = np.flatnonzero(dist <= kth)
    order = np.lexsort((cand, dist[cand]))[:k]
    return [(float(dist[cand[o]]), int(cand[o]) + start) for o in order]


def query(
    kb: KnowledgeBase,
    q: SparseVector,
    metric: "Metric | str" = Metric.COSINE,
    k: int = 1,
    workers: int = 1,
) -> list[Neighbor]:
    """The *k* rows nearest to *q*, ascending by distance, ties by row index."""
    metric = parse_metric(metric)
    _check_query(kb, q, metric)
    if k < 1:
        raise ConfigInvalid(f"k must be >= 1, got {k}")
    if k > len(kb):
        raise KTooLarge(f"k={k} exceeds the {len(kb)} knowledge-base rows")
    indptr, indices, data = kb.csr
    qi, qv = q.arrays
    out = np.empty(len(kb))

    def scan(bounds):
        a, b = bounds
        scan_rows(metric.code, indptr, indices, data, qi, qv, a, b, out)
        return select_nearest(out[a:b], k, start=a)

    parts = _partitions(len(kb), workers)
    if len(parts) == 1:
        partials = [scan(parts[0])]
    else:
        partials = list(_executor(workers).map(scan, parts))
    merged = sorted(p for partial in partials for p in partial)[:k]
    return [Neighbor(i, kb.labels[i], d) for d, i in merged]


def vote(neighbors: Sequence[Neighbor], num_classes: int) -> int:
    """Majority label; ties go to the tied label whose best neighbor ranks first."""
    if not neighbors:
        raise ValueError("cannot vote without neighbors")
    counts = Counter(n.label for n in neighbors)
    if any(not 0 <= lab < num_classes for lab in counts):
        raise ValueError("neighbor label outside the class range")
    top = max(counts.values())
    for n in neighbors:
        if counts[n.label] == top:
            return n.label
    raise AssertionError("unreachable")


def _unclassifiable(kb: KnowledgeBase, config: ClassifyConfig) -> ClassificationResult:
    return ClassificationResult(
        similarity_value=0.0,
        label=None,
        knn_result=(0.0,) * kb.num_classes,
        in_domain=False,
        metric=config.metric,
        k=config.k,
    )


def classify(
    kb: KnowledgeBase,
    text: str,
    config: ClassifyConfig | None = None,
    pipeline: PipelineConfig | None = None,
) -> ClassificationResult:
    """Decide whether *text* belongs to the knowledge base's domain.

    The text goes through the KB's preprocessing pipeline, unknown terms get
    penalized extra dimensions, the k nearest rows vote on the label, and the
    sentence is in-domain when its smallest cosine distance is at most the
    threshold.
    """
    config = config or ClassifyConfig()
    pipeline = pipeline or default_pipeline()
    if pipeline.fingerprint != kb.fingerprint:
        raise FingerprintMismatch(
            "query pipeline differs from the one the knowledge base was built with"
        )
    if len(kb) == 0:
        raise EmptyKnowledgeBase("knowledge base has no rows")
    if config.k > len(kb):
        raise KTooLarge(f"k={config.k} exceeds the {len(kb)} knowledge-base rows")

    tokens = preprocess(text, pipeline)
    if pipeline.mode == "binary":
        tokens = list(dict.fromkeys(tokens))
    if not tokens:
        return _unclassifiable(kb, config)
    q = extend_query(tokens, kb.vocabulary, config.penalty_factor).vector

    neighbors = query(kb, q, config.metric, config.k, config.workers)
    label = vote(neighbors, kb.num_classes)
    if config.metric is Metric.COSINE:
        min_cos = neighbors[0].distance
    else:
        min_cos = float(row_distances(kb, q, Metric.COSINE, config.workers).min())
    knn = [0.0] * kb.num_classes
    knn[label] = 1.0
    return ClassificationResult(
        similarity_value=1.0 - min_cos if config.metric is Metric.COSINE else None,
        label=label,
        knn_result=tuple(knn),
        in_domain=min_cos <= config.threshold,
        neighbors=tuple(neighbors),
        metric=config.metric,
        k=config.k,
        min_distance=neighbors[0].distance,
        min_cosine_distance=min_cos,
        category=kb.categories[label],
    )


def pairwise_distance_matrix(kb: KnowledgeBase, metric: "Metric | str" = Metric.COSINE) -> np.ndarray:
    """Square matrix of row-to-row distances (symmetric, zero diagonal)."""
    metric = parse_metric(metric)
    n = len(kb)
    if n == 0:
        raise EmptyKnowledgeBase("knowledge base has no rows")
    indptr, indices, data = kb.csr
    m = np.zeros((n, n))
    for i in range(n):
        ai = indices[indptr[i]:indptr[i + 1]]
        av = data[indptr[i]:indptr[i + 1]]
        if metric is Metric.COSINE and ai.size == 0:
            raise ZeroVector(f"row {i} is a zero vector")
        row = np.empty(n - i)
        scan_rows(metric.code, indptr[i:], indices, data, ai, av, 0, n - i, row)
        m[i, i:] = row
        m[i:, i] = row
    return m
