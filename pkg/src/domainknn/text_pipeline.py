"""Text preprocessing: tokenize, drop stopwords, map inflected forms to lemmas."""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import IoFailure, ResourceFormatError

__all__ = [
    "LemmaLexicon",
    "PipelineConfig",
    "MODES",
    "tokenize",
    "remove_stopwords",
    "lemmatize",
    "preprocess",
    "load_stopwords",
    "load_lexicon",
    "default_pipeline",
]

MODES = ("count", "binary")

# letters and digits only; `_` is part of \w, so it is excluded explicitly
_TOKEN_RE = re.compile(r"[^\W_]+")


class LemmaLexicon(Mapping[str, str]):
    """Flat inflected-form -> lemma table with identity fallback.

    The table must be idempotent: any lemma that also appears as a key has
    to map to itself, otherwise lemmatizing twice would differ from once.
    """

    def __init__(self, mapping: Mapping[str, str] | None = None):
        table = {k.lower(): v.lower() for k, v in (mapping or {}).items()}
        for form, lemma in table.items():
            if lemma in table and table[lemma] != lemma:
                raise ResourceFormatError(
                    f"lemma {lemma!r} (from {form!r}) maps further to {table[lemma]!r}"
                )
        self._table = table

    def __getitem__(self, form: str) -> str:
        return self._table[form]

    def __iter__(self):
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def lookup(self, form: str) -> str:
        return self._table.get(form, form)

    def __eq__(self, other) -> bool:
        if isinstance(other, LemmaLexicon):
            return self._table == other._table
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._table.items()))

    def __repr__(self) -> str:
        return f"LemmaLexicon({len(self._table)} entries)"


def tokenize(text: str) -> list[str]:
    """Split *text* into lowercase runs of Unicode letters and digits.

    Everything else (whitespace, punctuation, symbols) separates tokens and is
    discarded.

    >>> tokenize("ADSL-2 offerta")
    ['adsl', '2', 'offerta']
    """
    if not text:
        return []
    return _TOKEN_RE.findall(unicodedata.normalize("NFC", text.lower()))


def remove_stopwords(tokens: Sequence[str], stoplist: Iterable[str]) -> list[str]:
    stop = stoplist if isinstance(stoplist, (set, frozenset)) else frozenset(stoplist)
    return [t for t in tokens if t not in stop]


def lemmatize(tokens: Sequence[str], lexicon: Mapping[str, str]) -> list[str]:
    return [lexicon.get(t, t) for t in tokens]


@dataclass(frozen=True)
class PipelineConfig:
    """Preprocessing resources plus the vector encoding mode.

    ``fingerprint`` identifies the whole configuration; knowledge bases record
    it so a query is never encoded under a different pipeline than the one
    the knowledge base was built with.
    """

    stopwords: frozenset[str] = frozenset()
    lexicon: LemmaLexicon = field(default_factory=LemmaLexicon)
    mode: str = "count"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))
        if not isinstance(self.lexicon, LemmaLexicon):
            object.__setattr__(self, "lexicon", LemmaLexicon(self.lexicon))

    @property
    def fingerprint(self) -> str:
        canonical = json.dumps(
            {
                "stopwords": sorted(self.stopwords),
                "lemmas": sorted(self.lexicon.items()),
                "mode": self.mode,
            },
            ensure_ascii=False,
            separators=(",", ":"),
        )
        return "sha256:" + hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def preprocess(text: str, config: PipelineConfig | None = None) -> list[str]:
    """Tokenize, then remove stopwords, then lemmatize (fixed order)."""
    if config is None:
        config = default_pipeline()
    tokens = remove_stopwords(tokenize(text), config.stopwords)
    return lemmatize(tokens, config.lexicon)


def _resource_lines(path: str | Path | None, default_name: str) -> list[tuple[int, str]]:
    try:
        if path is None:
            text = resources.files("domainknn.data").joinpath(default_name).read_text("utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ResourceFormatError(f"{path} is not valid UTF-8: {exc}") from exc
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((lineno, raw.rstrip("\r\n")))
    return out


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a one-term-per-line stopword file; ``None`` loads the shipped Italian list."""
    return frozenset(line.strip().lower() for _, line in _resource_lines(path, "stopwords_it.txt"))


def load_lexicon(path: str | Path | None = None) -> LemmaLexicon:
    """Read an ``inflected<TAB>lemma`` file; ``None`` loads the shipped Italian table."""
    table: dict[str, str] = {}
    where = path or "<default lexicon>"
    for lineno, line in _resource_lines(path, "lemmas_it.tsv"):
        parts = line.strip().split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ResourceFormatError(f"{where}:{lineno}: expected 'inflected<TAB>lemma'")
        form, lemma = parts[0].strip().lower(), parts[1].strip().lower()
        if form in table:
            raise ResourceFormatError(f"{where}:{lineno}: duplicate inflected form {form!r}")
        table[form] = lemma
    return LemmaLexicon(table)


@lru_cache(maxsize=1)
def default_pipeline() -> PipelineConfig:
    return PipelineConfig(load_stopwords(), load_lexicon(), "count")
