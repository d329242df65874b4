"""Knowledge-base construction, corpus ingestion and persistence."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AllDocumentsFiltered,
    CorpusFormatError,
    CorruptFile,
    EmptyCorpus,
    FormatVersionMismatch,
    IoFailure,
)
from .text_pipeline import PipelineConfig, default_pipeline, preprocess
from .vectorspace import SparseVector, Vocabulary, build_vocabulary, vectorize

__all__ = [
    "KB_FORMAT",
    "CorpusDocument",
    "KnowledgeBase",
    "build_kb",
    "save_kb",
    "load_kb",
    "read_corpus",
]

log = logging.getLogger(__name__)

KB_FORMAT = 1


@dataclass(frozen=True)
class CorpusDocument:
    category: str
    text: str

    def __post_init__(self):
        if not isinstance(self.category, str) or not self.category:
            raise CorpusFormatError("document category must be a non-empty string")
        if not isinstance(self.text, str):
            raise CorpusFormatError("document text must be a string")


@dataclass(frozen=True)
class KnowledgeBase:
    """Labeled document vectors (the matrix searched by every query).

    ``texts`` holds the source text of each row (used for benchmarking and
    inspection); ``dropped`` lists corpus positions that encoded to a zero
    vector and were left out.
    """

    vocabulary: Vocabulary
    rows: tuple[SparseVector, ...]
    labels: tuple[int, ...]
    categories: tuple[str, ...]
    fingerprint: str
    texts: tuple[str, ...] = ()
    dropped: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("rows", "labels", "categories", "texts", "dropped"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if len(self.rows) != len(self.labels):
            raise ValueError("rows and labels differ in length")
        if self.texts and len(self.texts) != len(self.rows):
            raise ValueError("texts and rows differ in length")
        if list(self.categories) != sorted(set(self.categories)):
            raise ValueError("categories must be distinct and sorted")
        dim = len(self.vocabulary)
        for pos, (row, label) in enumerate(zip(self.rows, self.labels)):
            if row.dimension != dim:
                raise ValueError(f"row {pos} has dimension {row.dimension}, expected {dim}")
            if row.nnz == 0:
                raise ValueError(f"row {pos} is a zero vector")
            if not 0 <= label < len(self.categories):
                raise ValueError(f"row {pos} has label {label} outside the category range")

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    @property
    def num_classes(self) -> int:
        return len(self.categories)

    def __len__(self) -> int:
        return len(self.rows)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Rows packed as CSR ``(indptr, indices, data)`` arrays."""
        indptr = np.zeros(len(self.rows) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([r.nnz for r in self.rows])
        indices = np.fromiter((i for r in self.rows for i in r.indices), np.int64, int(indptr[-1]))
        data = np.fromiter((v for r in self.rows for v in r.values), np.float64, int(indptr[-1]))
        return indptr, indices, data


def build_kb(
    corpus: Sequence[CorpusDocument], config: PipelineConfig | None = None
) -> KnowledgeBase:
    """Preprocess, vectorize (per the pipeline's mode) and label every document.

    Class ids follow lexicographic category order. Documents that reduce to a
    zero vector are dropped with a warning.
    """
    if config is None:
        config = default_pipeline()
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("corpus has no documents")
    token_lists = [preprocess(doc.text, config) for doc in corpus]
    try:
        vocab = build_vocabulary(token_lists)
    except EmptyCorpus:
        raise AllDocumentsFiltered(
            f"all {len(corpus)} documents are empty after preprocessing"
        ) from None

    kept: list[tuple[CorpusDocument, SparseVector]] = []
    dropped = []
    for pos, (doc, tokens) in enumerate(zip(corpus, token_lists)):
        vec = vectorize(tokens, vocab, config.mode)
        if vec.nnz == 0:
            dropped.append(pos)
        else:
            kept.append((doc, vec))
    if dropped:
        log.warning("dropped %d document(s) empty after preprocessing: %s", len(dropped), dropped)

    categories = tuple(sorted({doc.category for doc, _ in kept}))
    class_id = {c: i for i, c in enumerate(categories)}
    return KnowledgeBase(
        vocabulary=vocab,
        rows=tuple(v for _, v in kept),
        labels=tuple(class_id[d.category] for d, _ in kept),
        categories=categories,
        fingerprint=config.fingerprint,
        texts=tuple(d.text for d, _ in kept),
        dropped=tuple(dropped),
    )


def _payload(kb: KnowledgeBase) -> dict:
    return {
        "vocabulary": list(kb.vocabulary.terms),
        "rows": [[[i, v] for i, v in zip(r.indices, r.values)] for r in kb.rows],
        "labels": list(kb.labels),
        "categories": list(kb.categories),
        "fingerprint": kb.fingerprint,
        "texts": list(kb.texts),
        "dropped": list(kb.dropped),
    }


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_kb(kb: KnowledgeBase, path: str | Path) -> None:
    payload = _payload(kb)
    doc = {"kbFormat": KB_FORMAT, "checksum": _checksum(payload), "payload": payload}
    try:
        Path(path).write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_kb(path: str | Path) -> KnowledgeBase:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFile(f"{path} is not a readable KB file: {exc}") from exc
    if not isinstance(doc, dict) or "kbFormat" not in doc:
        raise CorruptFile(f"{path} has no kbFormat field")
    if doc["kbFormat"] != KB_FORMAT:
        raise FormatVersionMismatch(
            f"{path} has kbFormat {doc['kbFormat']!r}, this build reads {KB_FORMAT}"
        )
    payload = doc.get("payload")
    if not isinstance(payload, dict) or doc.get("checksum") != _checksum(payload):
        raise CorruptFile(f"{path} failed its checksum")
    try:
        vocab = Vocabulary(tuple(payload["vocabulary"]))
        rows = tuple(
            SparseVector(len(vocab), tuple(i for i, _ in r), tuple(v for _, v in r))
            for r in payload["rows"]
        )
        return KnowledgeBase(
            vocabulary=vocab,
            rows=rows,
            labels=tuple(payload["labels"]),
            categories=tuple(payload["categories"]),
            fingerprint=payload["fingerprint"],
            texts=tuple(payload.get("texts", ())),
            dropped=tuple(payload.get("dropped", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFile(f"{path} payload is inconsistent: {exc}") from exc


def _parse_jsonl(text: str, where: str) -> list[CorpusDocument]:
    docs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            docs.append(CorpusDocument(obj["category"], obj["text"]))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorpusFormatError(f"{where}:{lineno}: {exc}") from exc
        except CorpusFormatError as exc:
            raise CorpusFormatError(f"{where}:{lineno}: {exc}") from exc
    return docs


def _parse_csv(text: str, where: str) -> list[CorpusDocument]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or {"category", "text"} - set(reader.fieldnames):
        raise CorpusFormatError(f"{where}: CSV header must contain 'category,text'")
    docs = []
    for rec in reader:
        try:
            docs.append(CorpusDocument(rec["category"], rec["text"] or ""))
        except CorpusFormatError as exc:
            raise CorpusFormatError(f"{where}:{reader.line_num}: {exc}") from exc
    return docs


def read_corpus(path: str | Path) -> list[CorpusDocument]:
    """Load a JSON Lines corpus, or a CSV one (``.csv`` suffix or a ``category,text`` header)."""
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise CorpusFormatError(f"{path} is not valid UTF-8") from exc
    first = text.lstrip().split("\n", 1)[0].strip()
    if str(path).lower().endswith(".csv") or first.replace(" ", "") == "category,text":
        return _parse_csv(text, str(path))
    return _parse_jsonl(text, str(path))


def documents_from_pairs(pairs: Iterable[tuple[str, str]]) -> list[CorpusDocument]:
    return [CorpusDocument(c, t) for c, t in pairs]
