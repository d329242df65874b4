"""Command-line entry point: ``domainknn build|classify|evaluate|bench``.

Everything written to stdout is JSON (one object per line). Failures print
``{"error": <kind>, "message": ...}`` to stderr and exit 1; bad usage or
invalid settings exit 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import run_bench
from .errors import ConfigInvalid, DomainKnnError
from .evaluation import TABLE_METRICS, evaluate
from .kb_store import build_kb, load_kb, read_corpus, save_kb
from .knn_engine import DEFAULT_THRESHOLD, ClassifyConfig, classify
from .metrics import METRIC_NAMES
from .text_pipeline import MODES, LemmaLexicon, PipelineConfig, load_lexicon, load_stopwords
from .vectorspace import DEFAULT_PENALTY

log = logging.getLogger("domainknn")

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 1, 2


def _emit(obj, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n")
    stream.flush()


def _csv_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _metric_list(text: str) -> list[str]:
    names = _csv_list(text)
    bad = [n for n in names if n not in METRIC_NAMES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown metric(s) {bad}; choose from {METRIC_NAMES}")
    return names


def pipeline_from_args(args) -> PipelineConfig:
    """``--stopwords``/``--lemmas`` take a path, ``none`` for empty, or nothing for the shipped lists."""
    if args.stopwords == "none":
        stop = frozenset()
    else:
        stop = load_stopwords(args.stopwords)
    if args.lemmas == "none":
        lex = LemmaLexicon()
    else:
        lex = load_lexicon(args.lemmas)
    return PipelineConfig(stop, lex, args.mode)


def _classify_config(args) -> ClassifyConfig:
    return ClassifyConfig(
        metric=args.metric,
        k=args.k,
        threshold=args.threshold,
        penalty_factor=args.penalty,
        workers=args.workers,
    )


def cmd_build(args) -> int:
    pipeline = pipeline_from_args(args)
    kb = build_kb(read_corpus(args.corpus), pipeline)
    save_kb(kb, args.out)
    _emit({
        "rows": len(kb),
        "classes": kb.num_classes,
        "vocabulary": kb.dimension,
        "dropped": list(kb.dropped),
        "categories": list(kb.categories),
        "fingerprint": kb.fingerprint,
        "output": str(args.out),
    })
    return EXIT_OK


def cmd_classify(args) -> int:
    config = _classify_config(args)
    pipeline = pipeline_from_args(args)
    kb = load_kb(args.kb)
    lines = [args.text] if args.text is not None else (l.rstrip("\r\n") for l in sys.stdin)
    for line in lines:
        _emit(classify(kb, line, config, pipeline).to_json_dict())
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.protocol == "split" and args.seed is None:
        raise ConfigInvalid("--protocol split requires --seed")
    report = evaluate(
        read_corpus(args.corpus),
        metrics=args.metrics,
        ks=args.ks,
        protocol=args.protocol,
        seed=args.seed,
        split_ratio=args.split_ratio,
        pipeline=pipeline_from_args(args),
        penalty_factor=args.penalty,
        workers=args.workers,
    )
    out = report.to_json_dict()
    if args.figure:
        from .plotting import plot_accuracy

        out["figure"] = str(plot_accuracy(report, args.figure))
    _emit(out)
    print(report.table(), file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _classify_config(args)
    pipeline = pipeline_from_args(args)
    kb = load_kb(args.kb)
    report = run_bench(kb, args.queries, config, pipeline, seed=args.seed)
    out = report.to_json_dict()
    if args.figure:
        from .plotting import plot_latencies

        out["figure"] = str(plot_latencies(report, args.figure))
    _emit(out)
    return EXIT_OK


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stopwords", metavar="PATH", help="stopword file, or 'none' (default: shipped Italian list)")
    p.add_argument("--lemmas", metavar="PATH", help="lemma table, or 'none' (default: shipped Italian table)")
    p.add_argument("--mode", choices=MODES, default="count", help="vector encoding (default: count)")


def _add_query_flags(p: argparse.ArgumentParser, k_flag: bool = True) -> None:
    p.add_argument("--metric", choices=METRIC_NAMES, default="cosine")
    if k_flag:
        p.add_argument("--k", type=int, default=1)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--penalty", type=float, default=DEFAULT_PENALTY)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="domainknn", description="Sentence domain classification by brute-force k-NN."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a knowledge base from a corpus")
    p.add_argument("corpus", type=Path, help="JSONL or CSV corpus with category/text fields")
    p.add_argument("out", type=Path, help="knowledge-base file to write")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("classify", help="classify a sentence, or every stdin line")
    p.add_argument("kb", type=Path)
    p.add_argument("text", nargs="?", help="sentence to classify (default: read lines from stdin)")
    _add_query_flags(p)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="accuracy per metric and k")
    p.add_argument("corpus", type=Path)
    p.add_argument("--metrics", type=_metric_list,
                   default=[m.value for m in TABLE_METRICS], help="comma-separated metric names")
    p.add_argument("--ks", type=_csv_ints, default=[1, 2, 3], help="comma-separated k values")
    p.add_argument("--protocol", choices=("loo", "split"), default="loo")
    p.add_argument("--seed", type=int)
    p.add_argument("--split-ratio", type=float, default=0.8)
    p.add_argument("--penalty", type=float, default=DEFAULT_PENALTY)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--figure", type=Path, help="also render an accuracy chart to this file")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="time classifications against a knowledge base")
    p.add_argument("kb", type=Path)
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--figure", type=Path, help="also render a latency histogram to this file")
    _add_query_flags(p)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        _emit({"error": exc.kind, "message": str(exc)}, sys.stderr)
        return EXIT_USAGE
    except (DomainKnnError, ValueError) as exc:
        _emit({"error": getattr(exc, "kind", "Error"), "message": str(exc)}, sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
