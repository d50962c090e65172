"""Token embeddings for semantic keyword matching.

The bundled vector file covers the taxonomy vocabulary plus common schema
terms. Tokens outside the vocabulary are composed from character n-gram
vectors derived from the vocabulary, so no token is ever out-of-vocabulary.
"""

from __future__ import annotations

import hashlib
import math
import random
from functools import lru_cache
from importlib import resources
from pathlib import Path

_NGRAM_MIN = 3
_NGRAM_MAX = 5

# Structural connectives dropped before averaging token vectors, which keeps
# keyword scoring insensitive to subword order (DATE_OF_BIRTH vs BIRTH_DATE).
STOP_TOKENS = frozenset({"OF", "THE", "AND", "FOR"})

Vector = tuple[float, ...]


def _unit(vec: list[float]) -> Vector:
    norm = math.sqrt(sum(x * x for x in vec)) or 1.0
    return tuple(x / norm for x in vec)


def _hash_unit(tag: str, dim: int) -> Vector:
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    return _unit([rng.gauss(0.0, 1.0) for _ in range(dim)])


def cosine_similarity(u: Vector, v: Vector) -> float:
    num = sum(a * b for a, b in zip(u, v))
    du = math.sqrt(sum(a * a for a in u))
    dv = math.sqrt(sum(b * b for b in v))
    if du == 0.0 or dv == 0.0:
        return 0.0
    return num / (du * dv)


def _char_ngrams(token: str) -> list[str]:
    padded = f"<{token}>"
    grams = []
    for n in range(_NGRAM_MIN, _NGRAM_MAX + 1):
        for i in range(len(padded) - n + 1):
            grams.append(padded[i : i + n])
    return grams


class EmbeddingProvider:
    """Dense vectors per token, with character n-gram fallback composition."""

    def __init__(self, vectors: dict[str, Vector], dim: int):
        self.dim = dim
        self._vectors = vectors
        self._ngrams: dict[str, Vector] = {}
        sums: dict[str, list[float]] = {}
        counts: dict[str, int] = {}
        for token, vec in vectors.items():
            for gram in set(_char_ngrams(token)):
                acc = sums.setdefault(gram, [0.0] * dim)
                for i, x in enumerate(vec):
                    acc[i] += x
                counts[gram] = counts.get(gram, 0) + 1
        for gram, acc in sums.items():
            self._ngrams[gram] = _unit(acc)

    def __len__(self) -> int:
        return len(self._vectors)

    def embed_token(self, token: str) -> Vector:
        tok = token.lower()
        vec = self._vectors.get(tok)
        if vec is not None:
            return vec
        acc = [0.0] * self.dim
        known = 0
        for gram in _char_ngrams(tok):
            gvec = self._ngrams.get(gram)
            if gvec is None:
                continue
            known += 1
            for i, x in enumerate(gvec):
                acc[i] += x
        if known:
            return _unit(acc)
        return _hash_unit("oov::" + tok, self.dim)

    def embed_tokens(self, tokens: list[str]) -> Vector | None:
        """Mean of the token vectors; order-insensitive by construction."""
        kept = [t for t in tokens if t.upper() not in STOP_TOKENS]
        if not kept:
            kept = tokens
        if not kept:
            return None
        acc = [0.0] * self.dim
        for tok in kept:
            for i, x in enumerate(self.embed_token(tok)):
                acc[i] += x
        return tuple(x / len(kept) for x in acc)


def parse_vectors(text: str) -> EmbeddingProvider:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty vector file")
    dim = int(lines[0].strip())
    vectors: dict[str, Vector] = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != dim + 1:
            raise ValueError(f"vector line {lineno}: expected {dim} components")
        vectors[parts[0]] = tuple(float(x) for x in parts[1:])
    return EmbeddingProvider(vectors, dim)


@lru_cache(maxsize=4)
def load_embeddings(path: str | Path | None = None) -> EmbeddingProvider:
    """Load the bundled vector file, or a drop-in replacement when given.

    Cached: providers are immutable after construction, so repeated pipeline
    runs share one instance.
    """
    if path is not None:
        return parse_vectors(Path(path).read_text(encoding="utf-8"))
    text = resources.files("secretrisk").joinpath("data/vectors.txt").read_text("utf-8")
    return parse_vectors(text)
