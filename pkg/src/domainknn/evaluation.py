"""Accuracy of k-NN classification per (metric, k), laid out like a
metrics-by-k accuracy table.

Two protocols are offered:

* ``loo`` - every document is classified against all the others.
* ``split`` - seeded stratified split; the training part becomes the
  knowledge base and the held-out part is classified against it.

The corpus is put in canonical ``(category, text)`` order first, so results
do not depend on the order of the input lines.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigInvalid, ProtocolInfeasible
from .kb_store import CorpusDocument, KnowledgeBase, build_kb
from .knn_engine import Neighbor, query, select_nearest, vote
from .metrics import Metric, parse_metric, scan_rows
from .text_pipeline import PipelineConfig, default_pipeline, preprocess
from .vectorspace import DEFAULT_PENALTY, extend_query

__all__ = ["TABLE_METRICS", "CellResult", "EvaluationReport", "evaluate"]

# column set of the reference accuracy table
TABLE_METRICS = (Metric.EUCLIDEAN, Metric.MANHATTAN, Metric.CANBERRA, Metric.COSINE)


@dataclass
class CellResult:
    metric: Metric
    k: int
    correct: int = 0
    total: int = 0
    unclassified: int = 0
    confusion: list[list[int]] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def accuracy_percent(self) -> float:
        return round(100.0 * self.accuracy, 2)

    def to_json_dict(self) -> dict:
        return {
            "metric": self.metric.value,
            "k": self.k,
            "correct": self.correct,
            "total": self.total,
            "unclassified": self.unclassified,
            "accuracy": self.accuracy,
            "accuracyPercent": self.accuracy_percent,
            "confusion": self.confusion,
        }


@dataclass
class EvaluationReport:
    categories: tuple[str, ...]
    metrics: tuple[Metric, ...]
    ks: tuple[int, ...]
    protocol: dict
    cells: dict[tuple[Metric, int], CellResult]
    documents: int
    dropped: int = 0

    def cell(self, metric: "Metric | str", k: int) -> CellResult:
        return self.cells[(parse_metric(metric), k)]

    def table(self) -> str:
        """Rows ``1-NN, 2-NN, ...``, one column per metric, accuracies in percent."""
        headers = ["Metric"] + [m.value.capitalize() for m in self.metrics]
        body = [
            [f"{k}-NN"] + [f"{self.cells[(m, k)].accuracy_percent:.2f}%" for m in self.metrics]
            for k in self.ks
        ]
        widths = [max(len(r[c]) for r in [headers] + body) for c in range(len(headers))]
        lines = []
        for r in [headers] + body:
            cells = [r[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(r[1:], widths[1:])]
            lines.append("  ".join(cells))
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "documents": self.documents,
            "dropped": self.dropped,
            "categories": list(self.categories),
            "metrics": [m.value for m in self.metrics],
            "ks": list(self.ks),
            "cells": [self.cells[(m, k)].to_json_dict() for k in self.ks for m in self.metrics],
            "table": self.table(),
        }


def _canonical(corpus: Sequence[CorpusDocument]) -> list[CorpusDocument]:
    return sorted(corpus, key=lambda d: (d.category, d.text))


def _check_feasible(labels: Sequence[int], categories: Sequence[str], kmax: int, what: str) -> None:
    if len(categories) < 2:
        raise ProtocolInfeasible(f"{what}: need at least 2 categories, got {len(categories)}")
    counts = Counter(labels)
    thin = [categories[c] for c in range(len(categories)) if counts[c] < kmax + 1]
    if thin:
        raise ProtocolInfeasible(
            f"{what}: categories {thin} have fewer than k+1={kmax + 1} documents"
        )


def _record(cell: CellResult, truth: int, predicted: int | None) -> None:
    cell.total += 1
    if predicted is None:
        cell.unclassified += 1
        return
    cell.confusion[truth][predicted] += 1
    if predicted == truth:
        cell.correct += 1


def _loo(kb: KnowledgeBase, metrics, ks, penalty: float, cells) -> None:
    # Held-out row i behaves as a query against the KB without i: its terms
    # found in no other row are out-of-vocabulary there, so they carry the
    # penalty, and every other row is zero in those coordinates already.
    indptr, indices, data = kb.csr
    df = np.bincount(indices, minlength=kb.dimension)
    n = len(kb)
    kmax = max(ks)
    dist = np.empty(n)
    for i in range(n):
        qi = indices[indptr[i]:indptr[i + 1]]
        qv = data[indptr[i]:indptr[i + 1]].copy()
        qv[df[qi] == 1] *= penalty
        for metric in metrics:
            scan_rows(metric.code, indptr, indices, data, qi, qv, 0, n, dist)
            dist[i] = np.inf
            nearest = select_nearest(dist, kmax)
            neighbors = [Neighbor(j, kb.labels[j], d) for d, j in nearest]
            for k in ks:
                _record(cells[(metric, k)], kb.labels[i], vote(neighbors[:k], kb.num_classes))


def _split(corpus, pipeline, metrics, ks, penalty, seed, ratio, workers, cells, categories):
    by_cat: dict[str, list[CorpusDocument]] = {}
    for doc in corpus:
        by_cat.setdefault(doc.category, []).append(doc)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cat in sorted(by_cat):
        docs = by_cat[cat]
        n_train = int(round(ratio * len(docs)))
        if not 1 <= n_train < len(docs):
            raise ProtocolInfeasible(
                f"split: category {cat!r} with {len(docs)} documents cannot be split at {ratio}"
            )
        perm = rng.permutation(len(docs))
        train += [docs[j] for j in sorted(perm[:n_train])]
        test += [docs[j] for j in sorted(perm[n_train:])]
    kb = build_kb(train, pipeline)
    if kb.categories != tuple(categories):
        raise ProtocolInfeasible("split: a category has no usable training documents")
    if max(ks) > len(kb):
        raise ProtocolInfeasible(f"split: k={max(ks)} exceeds {len(kb)} training rows")
    class_id = {c: i for i, c in enumerate(kb.categories)}
    kmax = max(ks)
    for doc in test:
        truth = class_id[doc.category]
        tokens = preprocess(doc.text, pipeline)
        if pipeline.mode == "binary":
            tokens = list(dict.fromkeys(tokens))
        if not tokens:
            for metric in metrics:
                for k in ks:
                    _record(cells[(metric, k)], truth, None)
            continue
        q = extend_query(tokens, kb.vocabulary, penalty).vector
        for metric in metrics:
            nearest = query(kb, q, metric, kmax, workers)
            for k in ks:
                _record(cells[(metric, k)], truth, vote(nearest[:k], kb.num_classes))
    return len(test)


def evaluate(
    corpus: Sequence[CorpusDocument],
    metrics: Sequence["Metric | str"] = TABLE_METRICS,
    ks: Sequence[int] = (1, 2, 3),
    protocol: str = "loo",
    seed: int | None = None,
    split_ratio: float = 0.8,
    pipeline: PipelineConfig | None = None,
    penalty_factor: float = DEFAULT_PENALTY,
    workers: int = 1,
) -> EvaluationReport:
    pipeline = pipeline or default_pipeline()
    metrics = tuple(parse_metric(m) for m in metrics)
    ks = tuple(ks)
    if not metrics or not ks:
        raise ConfigInvalid("need at least one metric and one k")
    if any(isinstance(k, bool) or not isinstance(k, int) or k < 1 for k in ks):
        raise ConfigInvalid(f"ks must be positive integers, got {ks}")
    if len(set(metrics)) != len(metrics) or len(set(ks)) != len(ks):
        raise ConfigInvalid("metrics and ks must not repeat")
    if not penalty_factor > 0:
        raise ConfigInvalid("penalty factor must be positive")
    corpus = _canonical(corpus)

    if protocol == "loo":
        kb = build_kb(corpus, pipeline)
        _check_feasible(kb.labels, kb.categories, max(ks), "loo")
        categories = kb.categories
        cells = _new_cells(metrics, ks, len(categories))
        _loo(kb, metrics, ks, penalty_factor, cells)
        desc = {"name": "loo"}
        dropped = len(kb.dropped)
    elif protocol == "split":
        if seed is None:
            raise ConfigInvalid("the split protocol requires a seed")
        if not 0.0 < split_ratio < 1.0:
            raise ConfigInvalid(f"split ratio must lie in (0, 1), got {split_ratio}")
        categories = tuple(sorted({d.category for d in corpus}))
        class_id = {c: i for i, c in enumerate(categories)}
        _check_feasible([class_id[d.category] for d in corpus], categories, max(ks), "split")
        cells = _new_cells(metrics, ks, len(categories))
        _split(corpus, pipeline, metrics, ks, penalty_factor, seed, split_ratio, workers,
               cells, categories)
        desc = {"name": "split", "seed": seed, "splitRatio": split_ratio}
        dropped = 0
    else:
        raise ConfigInvalid(f"unknown protocol {protocol!r}; expected 'loo' or 'split'")

    desc["penaltyFactor"] = penalty_factor
    desc["mode"] = pipeline.mode
    return EvaluationReport(
        categories=tuple(categories),
        metrics=metrics,
        ks=ks,
        protocol=desc,
        cells=cells,
        documents=len(corpus),
        dropped=dropped,
    )


def _new_cells(metrics, ks, n_classes) -> dict[tuple[Metric, int], CellResult]:
    return {
        (m, k): CellResult(m, k, confusion=[[0] * n_classes for _ in range(n_classes)])
        for m in metrics
        for k in ks
    }
