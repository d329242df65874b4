"""Query-latency benchmark over texts sampled from a knowledge base."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass

import numpy as np

from .kb_store import KnowledgeBase
from .knn_engine import ClassifyConfig, classify
from .text_pipeline import PipelineConfig

__all__ = ["BenchReport", "run_bench"]


@dataclass
class BenchReport:
    kb_rows: int
    queries: int
    workers: int
    latencies_ms: list[float]
    results_digest: str

    @property
    def stats(self) -> dict:
        lat = np.asarray(self.latencies_ms)
        return {
            "min": float(lat.min()),
            "mean": float(lat.mean()),
            "p95": float(np.percentile(lat, 95)),
            "max": float(lat.max()),
        }

    def to_json_dict(self) -> dict:
        return {
            "kbRows": self.kb_rows,
            "queries": self.queries,
            "workers": self.workers,
            "latencyMs": self.stats,
            "resultsDigest": self.results_digest,
        }


def run_bench(
    kb: KnowledgeBase,
    queries: int = 100,
    config: ClassifyConfig | None = None,
    pipeline: PipelineConfig | None = None,
    seed: int = 0,
) -> BenchReport:
    """Time *queries* classifications of KB texts drawn with a seeded RNG.

    One untimed warm-up call runs first so one-off kernel compilation is not
    counted. ``results_digest`` hashes every result, so runs with different
    worker counts can be compared for identical output.
    """
    if queries < 1:
        raise ValueError("queries must be >= 1")
    if not kb.texts:
        raise ValueError("knowledge base carries no source texts to sample")
    config = config or ClassifyConfig()
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(kb.texts), size=queries)
    classify(kb, kb.texts[int(picks[0])], config, pipeline)

    digest = hashlib.sha256()
    latencies = []
    for p in picks:
        t0 = time.perf_counter()
        result = classify(kb, kb.texts[int(p)], config, pipeline)
        latencies.append((time.perf_counter() - t0) * 1000.0)
        digest.update(json.dumps(result.to_json_dict(), sort_keys=True).encode())
        digest.update(b"\n")
    return BenchReport(len(kb), queries, config.workers, latencies, "sha256:" + digest.hexdigest())
