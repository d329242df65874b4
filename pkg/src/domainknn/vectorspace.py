"""Vocabulary construction and bag-of-words encoding.

Vectors are sparse: only positive coordinates are stored, indices ascending.
A query may carry extra coordinates beyond the vocabulary, one per distinct
out-of-vocabulary term, holding ``count * penalty_factor``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionShrink, EmptyCorpus

__all__ = [
    "DEFAULT_PENALTY",
    "Vocabulary",
    "SparseVector",
    "ExtendedQuery",
    "build_vocabulary",
    "vectorize",
    "extend_query",
    "pad_row",
    "term_frequencies",
]

DEFAULT_PENALTY = 2.5


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        if list(terms) != sorted(set(terms)):
            raise ValueError("vocabulary terms must be distinct and sorted")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "index", {t: i for i, t in enumerate(terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: object) -> bool:
        return term in self.index


@dataclass(frozen=True)
class SparseVector:
    """Non-negative vector storing only its positive coordinates."""

    dimension: int
    indices: tuple[int, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.dimension < 0:
            raise ValueError("dimension must be non-negative")
        indices = tuple(int(i) for i in self.indices)
        values = tuple(float(v) for v in self.values)
        if len(indices) != len(values):
            raise ValueError("indices and values differ in length")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("indices must be strictly ascending")
        if indices and (indices[0] < 0 or indices[-1] >= self.dimension):
            raise ValueError(f"index out of range for dimension {self.dimension}")
        if any(not v > 0 for v in values):
            raise ValueError("stored values must be positive")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_entries(cls, dimension: int, entries: Mapping[int, float]) -> "SparseVector":
        items = sorted((i, v) for i, v in entries.items() if v != 0)
        return cls(dimension, tuple(i for i, _ in items), tuple(v for _, v in items))

    @classmethod
    def from_dense(cls, dense: Iterable[float]) -> "SparseVector":
        dense = list(dense)
        return cls.from_entries(len(dense), dict(enumerate(dense)))

    @property
    def entries(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def get(self, index: int) -> float:
        return self.entries.get(index, 0.0)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension)
        out[list(self.indices)] = self.values
        return out

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indices, values)`` as int64/float64 arrays, for the distance kernels."""
        return (np.asarray(self.indices, dtype=np.int64), np.asarray(self.values, dtype=np.float64))


@dataclass(frozen=True)
class ExtendedQuery:
    vector: SparseVector
    extra_dimensions: tuple[tuple[str, int], ...]
    penalty_factor: float


def build_vocabulary(corpus: Iterable[Sequence[str]]) -> Vocabulary:
    terms = set()
    for tokens in corpus:
        terms.update(tokens)
    if not terms:
        raise EmptyCorpus("corpus contains no tokens")
    return Vocabulary(tuple(sorted(terms)))


def vectorize(tokens: Sequence[str], vocab: Vocabulary, mode: str = "count") -> SparseVector:
    """Encode *tokens* over *vocab*; out-of-vocabulary tokens are ignored."""
    if mode not in ("count", "binary"):
        raise ValueError(f"unknown mode {mode!r}")
    counts = Counter(vocab.index[t] for t in tokens if t in vocab.index)
    if mode == "binary":
        counts = {i: 1 for i in counts}
    return SparseVector.from_entries(len(vocab), counts)


def extend_query(
    tokens: Sequence[str], vocab: Vocabulary, penalty_factor: float = DEFAULT_PENALTY
) -> ExtendedQuery:
    """Count *tokens* over *vocab*, appending one penalized dimension per OOV term.

    OOV dimensions follow the vocabulary in order of first occurrence and
    hold ``raw_count * penalty_factor``.
    """
    if not penalty_factor > 0:
        raise ValueError("penalty_factor must be positive")
    known: Counter[int] = Counter()
    oov: dict[str, int] = {}
    for t in tokens:
        i = vocab.index.get(t)
        if i is None:
            oov[t] = oov.get(t, 0) + 1
        else:
            known[i] += 1
    base = len(vocab)
    entries: dict[int, float] = dict(known)
    for offset, count in enumerate(oov.values()):
        entries[base + offset] = count * penalty_factor
    vector = SparseVector.from_entries(base + len(oov), entries)
    return ExtendedQuery(vector, tuple(oov.items()), float(penalty_factor))


def pad_row(row: SparseVector, new_dimension: int) -> SparseVector:
    if new_dimension < row.dimension:
        raise DimensionShrink(f"cannot shrink dimension {row.dimension} to {new_dimension}")
    return SparseVector(new_dimension, row.indices, row.values)


def term_frequencies(corpus: Iterable[Sequence[str]]) -> list[tuple[str, int]]:
    """Corpus-wide term counts, most frequent first, ties alphabetical."""
    counts = Counter(t for tokens in corpus for t in tokens)
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
