"""Distances between equal-dimension non-negative sparse vectors.

All six metrics walk the two sorted index arrays in one merge pass and
accumulate in ascending index order. The same compiled kernel serves single
pairs and whole knowledge-base scans, so a distance is bit-identical however
it was requested. Accumulation order is symmetric in the two arguments, so
``d(a, b) == d(b, a)`` holds exactly.
"""

from __future__ import annotations

import math
from enum import Enum

import numba
import numpy as np

from .errors import ConfigInvalid, DimensionMismatch, ZeroVector
from .vectorspace import SparseVector

__all__ = [
    "Metric",
    "METRIC_NAMES",
    "parse_metric",
    "distance",
    "cosine_distance",
    "euclidean_distance",
    "manhattan_distance",
    "chebyshev_distance",
    "canberra_distance",
    "hamming_distance",
]


class Metric(str, Enum):
    COSINE = "cosine"
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    CHEBYSHEV = "chebyshev"
    CANBERRA = "canberra"
    HAMMING = "hamming"

    @property
    def code(self) -> int:
        return _CODES[self]

    def __str__(self) -> str:
        return self.value


METRIC_NAMES = tuple(m.value for m in Metric)
_CODES = {m: i for i, m in enumerate(Metric)}

COSINE, EUCLIDEAN, MANHATTAN, CHEBYSHEV, CANBERRA, HAMMING = range(6)


def parse_metric(metric: "Metric | str") -> Metric:
    if isinstance(metric, Metric):
        return metric
    try:
        return Metric(metric)
    except ValueError:
        raise ConfigInvalid(
            f"unknown metric {metric!r}; expected one of {', '.join(METRIC_NAMES)}"
        ) from None


@numba.njit(cache=True, nogil=True)
def pair_distance(code, ai, av, bi, bv):
    """Distance between two sparse vectors given as sorted (indices, values).

    Returns NaN for cosine when either vector has zero norm.
    """
    na = ai.shape[0]
    nb = bi.shape[0]
    if code == 0:
        dot = 0.0
        i = 0
        j = 0
        while i < na and j < nb:
            if ai[i] == bi[j]:
                dot += av[i] * bv[j]
                i += 1
                j += 1
            elif ai[i] < bi[j]:
                i += 1
            else:
                j += 1
        sa = 0.0
        for i in range(na):
            sa += av[i] * av[i]
        sb = 0.0
        for j in range(nb):
            sb += bv[j] * bv[j]
        if sa == 0.0 or sb == 0.0:
            return np.nan
        # sqrt of the product (not product of sqrts) keeps d(x, x) exactly 0
        cos = dot / np.sqrt(sa * sb)
        if cos > 1.0:
            cos = 1.0
        return 1.0 - cos

    acc = 0.0
    i = 0
    j = 0
    while i < na or j < nb:
        if j >= nb or (i < na and ai[i] < bi[j]):
            x = av[i]
            y = 0.0
            i += 1
        elif i >= na or bi[j] < ai[i]:
            x = 0.0
            y = bv[j]
            j += 1
        else:
            x = av[i]
            y = bv[j]
            i += 1
            j += 1
        d = abs(x - y)
        if code == 1:
            acc += d * d
        elif code == 2:
            acc += d
        elif code == 3:
            if d > acc:
                acc = d
        elif code == 4:
            s = abs(x) + abs(y)
            if s > 0.0:
                acc += d / s
        else:
            if x != y:
                acc += 1.0
    if code == 1:
        return np.sqrt(acc)
    return acc


@numba.njit(cache=True, nogil=True)
def scan_rows(code, indptr, indices, data, qi, qv, start, stop, out):
    """Fill ``out[r]`` with the distance from the query to CSR row ``r``."""
    for r in range(start, stop):
        s = indptr[r]
        e = indptr[r + 1]
        out[r] = pair_distance(code, indices[s:e], data[s:e], qi, qv)


def _check(a: SparseVector, b: SparseVector) -> None:
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions differ: {a.dimension} vs {b.dimension}")


def distance(a: SparseVector, b: SparseVector, metric: "Metric | str") -> float:
    metric = parse_metric(metric)
    _check(a, b)
    ai, av = a.arrays
    bi, bv = b.arrays
    value = float(pair_distance(metric.code, ai, av, bi, bv))
    if math.isnan(value):
        raise ZeroVector("cosine distance is undefined for a zero vector")
    return value


def cosine_distance(a: SparseVector, b: SparseVector) -> float:
    """``1 - a.b / (|a| |b|)``, in ``[0, 1]`` for non-negative vectors.

    Raises :class:`ZeroVector` when either vector is all zeros.
    """
    return distance(a, b, Metric.COSINE)


def euclidean_distance(a: SparseVector, b: SparseVector) -> float:
    return distance(a, b, Metric.EUCLIDEAN)


def manhattan_distance(a: SparseVector, b: SparseVector) -> float:
    return distance(a, b, Metric.MANHATTAN)


def chebyshev_distance(a: SparseVector, b: SparseVector) -> float:
    return distance(a, b, Metric.CHEBYSHEV)


def canberra_distance(a: SparseVector, b: SparseVector) -> float:
    """Sum of ``|a_i - b_i| / (|a_i| + |b_i|)``; coordinates where both are 0 add 0."""
    return distance(a, b, Metric.CANBERRA)


def hamming_distance(a: SparseVector, b: SparseVector) -> int:
    """Number of coordinates whose values differ (compared exactly)."""
    return int(distance(a, b, Metric.HAMMING))
