"""Report figures, rendered straight to image files (no GUI backend)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .bench import BenchReport
from .evaluation import EvaluationReport

__all__ = ["plot_accuracy", "plot_latencies"]


def _finish(fig: Figure, ax, path) -> Path:
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    return path


def plot_accuracy(report: EvaluationReport, path) -> Path:
    """Grouped bars: one group per k, one bar per metric."""
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    n = len(report.metrics)
    width = 0.8 / n
    x = np.arange(len(report.ks))
    for j, m in enumerate(report.metrics):
        acc = [100.0 * report.cells[(m, k)].accuracy for k in report.ks]
        bars = ax.bar(x + (j - (n - 1) / 2) * width, acc, width, label=m.value.capitalize())
        ax.bar_label(bars, fmt="%.1f", fontsize=7, padding=1)
    ax.set_xticks(x, [f"{k}-NN" for k in report.ks])
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 105)
    ax.set_title(f"k-NN accuracy ({report.protocol['name']}, {report.documents} docs)")
    ax.legend(frameon=False, fontsize=8, ncol=min(n, 4), loc="lower center")
    return _finish(fig, ax, path)


def plot_latencies(report: BenchReport, path) -> Path:
    fig = Figure(figsize=(6, 3.5))
    ax = fig.add_subplot()
    ax.hist(report.latencies_ms, bins=min(30, max(5, report.queries // 3)), color="0.4")
    stats = report.stats
    ax.axvline(stats["mean"], color="C3", lw=1, label=f"mean {stats['mean']:.2f} ms")
    ax.axvline(stats["p95"], color="C0", lw=1, ls="--", label=f"p95 {stats['p95']:.2f} ms")
    ax.set_xlabel("latency per query (ms)")
    ax.set_ylabel("queries")
    ax.set_title(f"{report.kb_rows} rows, {report.workers} worker(s)")
    ax.legend(frameon=False, fontsize=8)
    return _finish(fig, ax, path)
