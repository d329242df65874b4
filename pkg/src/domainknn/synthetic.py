"""Seeded synthetic corpora with controllable vocabulary overlap between categories.

Each category owns a private pool of pseudo-words; a shared pool is common
to all categories. A phrase template draws each of its words from the shared
pool with probability ``overlap`` and from its category's pool otherwise.
Every template is emitted ``variants`` times as word-order paraphrases, and
``noise`` replaces individual words of a variant with random shared words.

With ``overlap=0`` and ``noise=0`` category supports are disjoint and every
phrase has a same-category twin with an identical bag of words, so 1-NN is
exact under any metric.
"""

from __future__ import annotations

import numpy as np

from .kb_store import CorpusDocument
from .text_pipeline import PipelineConfig, default_pipeline

__all__ = ["pseudo_words", "synthetic_corpus"]

_CONSONANTS = "bcdfglmnprstvz"
_VOWELS = "aeiou"


def pseudo_words(n: int, rng: np.random.Generator, syllables: int = 3, avoid=frozenset()) -> list[str]:
    """*n* distinct consonant-vowel pseudo-words, none of them in *avoid*."""
    seen: set[str] = set()
    out = []
    while len(out) < n:
        word = "".join(
            _CONSONANTS[rng.integers(len(_CONSONANTS))] + _VOWELS[rng.integers(len(_VOWELS))]
            for _ in range(syllables)
        )
        if word not in seen and word not in avoid:
            seen.add(word)
            out.append(word)
    return out


def synthetic_corpus(
    categories: int = 10,
    per_category: int = 300,
    overlap: float = 0.0,
    seed: int = 0,
    words_per_category: int = 30,
    shared_words: int = 60,
    min_len: int = 4,
    max_len: int = 8,
    variants: int = 2,
    noise: float = 0.0,
    pipeline: PipelineConfig | None = None,
) -> list[CorpusDocument]:
    if not 0.0 <= overlap <= 1.0 or not 0.0 <= noise <= 1.0:
        raise ValueError("overlap and noise must lie in [0, 1]")
    if per_category % variants:
        raise ValueError("per_category must be a multiple of variants")
    if max_len > min(words_per_category, shared_words) or min_len < 1 or min_len > max_len:
        raise ValueError("phrase lengths must fit inside the word pools")
    pipeline = pipeline or default_pipeline()
    # generated words must survive preprocessing unchanged
    avoid = pipeline.stopwords | set(pipeline.lexicon) | set(pipeline.lexicon.values())
    rng = np.random.default_rng(seed)
    words = pseudo_words(categories * words_per_category + shared_words, rng, avoid=avoid)
    shared = words[categories * words_per_category:]

    docs = []
    for c in range(categories):
        own = words[c * words_per_category:(c + 1) * words_per_category]
        name = f"domain{c:02d}"
        for _ in range(per_category // variants):
            length = int(rng.integers(min_len, max_len + 1))
            n_shared = int(rng.binomial(length, overlap))
            template = list(rng.choice(shared, n_shared, replace=False)) + list(
                rng.choice(own, length - n_shared, replace=False)
            )
            for _ in range(variants):
                phrase = [template[j] for j in rng.permutation(length)]
                if noise:
                    for j in range(length):
                        if rng.random() < noise:
                            phrase[j] = shared[rng.integers(len(shared))]
                docs.append(CorpusDocument(name, " ".join(phrase)))
    return docs
