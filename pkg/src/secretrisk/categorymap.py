"""Map database keywords to sensitive-data categories and aggregate asset value.

Matching runs prefix (Jaro-Winkler), then substring (Gestalt), then semantic
(embedding cosine) over each normalized form of the keyword; the first stage
whose best-scoring category clears its cutoff wins. Keywords that clear no
stage carry an UNSPECIFIED sensitivity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .embedding import EmbeddingProvider, cosine_similarity
from .similarity import jaro_winkler_similarity, ratcliff_obershelp_similarity
from .taxonomy import SENSITIVITY_RANK, DataCategory, Taxonomy

PREFIX_CUTOFF = 0.7
SUBSTRING_CUTOFF = 0.7
SEMANTIC_CUTOFF = 0.65

# Structural tokens that carry no data meaning; ID is stripped only when other
# tokens remain (PATIENT_ID -> PATIENT, but bare ID stays ID).
_STOP_TOKENS = {"DB", "TBL", "COL"}
_CAMEL_SPLIT = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")
_SEPARATORS = re.compile(r"[\s\-./]+")


class Matcher(str, Enum):
    PREFIX = "Prefix"
    SUBSTRING = "Substring"
    SEMANTIC = "Semantic"
    NONE = "None"


class ValueLevel(str, Enum):
    HIGH = "HIGH"
    MODERATE = "MODERATE"
    LOW = "LOW"
    UNSPECIFIED = "UNSPECIFIED"


_VALUE_ORDER = {
    ValueLevel.UNSPECIFIED: 0,
    ValueLevel.LOW: 1,
    ValueLevel.MODERATE: 2,
    ValueLevel.HIGH: 3,
}


@dataclass(frozen=True)
class CategoryMapping:
    keyword: str
    normalized: str
    category: DataCategory | None
    matcher: Matcher
    score: float
    translated_from: str | None = None

    @property
    def level(self) -> ValueLevel:
        if self.category is None:
            return ValueLevel.UNSPECIFIED
        return ValueLevel(self.category.sensitivity.value)


@dataclass
class ValueCategory:
    level: ValueLevel
    evidence: list[CategoryMapping] = field(default_factory=list)


@dataclass(frozen=True)
class MatchCutoffs:
    prefix: float = PREFIX_CUTOFF
    substring: float = SUBSTRING_CUTOFF
    semantic: float = SEMANTIC_CUTOFF


def normalize_keyword(keyword: str) -> list[str]:
    """Candidate forms, most specific first: the canonical upper-cased form
    with separators unified to "_" and camelCase split, then the same form
    with structural stop-tokens stripped."""
    if not keyword:
        return []
    unified = _SEPARATORS.sub("_", keyword.strip())
    unified = _CAMEL_SPLIT.sub("_", unified)
    tokens = [t for t in unified.upper().split("_") if t]
    if not tokens:
        return []
    forms = ["_".join(tokens)]
    stripped = [t for t in tokens if t not in _STOP_TOKENS]
    if len(stripped) > 1:
        stripped = [t for t in stripped if t != "ID"]
    if stripped and stripped != tokens:
        form = "_".join(stripped)
        if form not in forms:
            forms.append(form)
    return forms


def _best_category(
    scores: list[tuple[DataCategory, float]], cutoff: float
) -> tuple[DataCategory, float] | None:
    """Highest score wins; exact ties prefer higher sensitivity, then name."""
    best: tuple[DataCategory, float] | None = None
    for category, score in scores:
        if score < cutoff:
            continue
        if best is None or score > best[1]:
            best = (category, score)
        elif score == best[1]:
            rank_new = SENSITIVITY_RANK[category.sensitivity]
            rank_old = SENSITIVITY_RANK[best[0].sensitivity]
            if rank_new > rank_old or (rank_new == rank_old and category.name < best[0].name):
                best = (category, score)
    return best


def prefix_match(
    keyword: str, taxonomy: Taxonomy, cutoff: float = PREFIX_CUTOFF
) -> tuple[DataCategory, float] | None:
    scores = [(c, jaro_winkler_similarity(keyword, c.name)) for c in taxonomy]
    return _best_category(scores, cutoff)


def substring_match(
    keyword: str, taxonomy: Taxonomy, cutoff: float = SUBSTRING_CUTOFF
) -> tuple[DataCategory, float] | None:
    scores = [(c, ratcliff_obershelp_similarity(keyword, c.name)) for c in taxonomy]
    return _best_category(scores, cutoff)


class SemanticIndex:
    """Precomputed mean vectors for every taxonomy category name."""

    def __init__(self, taxonomy: Taxonomy, embedder: EmbeddingProvider):
        self.embedder = embedder
        self._vectors = []
        for category in taxonomy:
            vec = embedder.embed_tokens(category.name.split("_"))
            if vec is not None:
                self._vectors.append((category, vec))

    def match(self, keyword: str, cutoff: float) -> tuple[DataCategory, float] | None:
        vec = self.embedder.embed_tokens(keyword.split("_"))
        if vec is None:
            return None
        scores = [
            (category, cosine_similarity(vec, cvec)) for category, cvec in self._vectors
        ]
        return _best_category(scores, cutoff)


def semantic_match(
    keyword: str,
    taxonomy: Taxonomy,
    embedder: EmbeddingProvider,
    cutoff: float = SEMANTIC_CUTOFF,
    index: SemanticIndex | None = None,
) -> tuple[DataCategory, float] | None:
    if index is None:
        index = SemanticIndex(taxonomy, embedder)
    return index.match(keyword, cutoff)


_NON_ASCII_LETTER = re.compile(r"[^\x00-\x7f]")


def needs_translation(keyword: str, translator) -> bool:
    if _NON_ASCII_LETTER.search(keyword):
        return True
    return bool(translator is not None and translator.knows(keyword))


class KeywordMapper:
    """Reusable mapping pipeline over one taxonomy and provider set."""

    def __init__(
        self,
        taxonomy: Taxonomy,
        embedder: EmbeddingProvider | None = None,
        translator=None,
        cutoffs: MatchCutoffs = MatchCutoffs(),
    ):
        self.taxonomy = taxonomy
        self.embedder = embedder
        self.translator = translator
        self.cutoffs = cutoffs
        self.diagnostics: list[str] = []
        self._semantic_index = (
            SemanticIndex(taxonomy, embedder) if embedder is not None else None
        )
        self._cache: dict[str, CategoryMapping] = {}

    def map_keyword(self, keyword: str) -> CategoryMapping:
        cached = self._cache.get(keyword)
        if cached is None:
            cached = self._map_uncached(keyword)
            self._cache[keyword] = cached
        return cached

    def _map_uncached(self, keyword: str) -> CategoryMapping:
        translated_from = None
        subject = keyword
        if self.translator is not None and needs_translation(keyword, self.translator):
            english = self.translator.translate(keyword)
            if english:
                translated_from = keyword
                subject = english
            else:
                self.diagnostics.append(f"translation unavailable for keyword: {keyword!r}")
        forms = normalize_keyword(subject)

        stages = [
            (Matcher.PREFIX, lambda f: prefix_match(f, self.taxonomy, self.cutoffs.prefix)),
            (
                Matcher.SUBSTRING,
                lambda f: substring_match(f, self.taxonomy, self.cutoffs.substring),
            ),
        ]
        if self._semantic_index is not None:
            stages.append(
                (
                    Matcher.SEMANTIC,
                    lambda f: self._semantic_index.match(f, self.cutoffs.semantic),
                )
            )
        else:
            self.diagnostics.append("semantic matcher skipped: embedder unavailable")

        # Within one stage every normalized form competes and the best score
        # wins; stages themselves stay strictly ordered.
        for matcher, stage in stages:
            best: tuple[float, int, str, DataCategory] | None = None
            for form_index, form in enumerate(forms):
                hit = stage(form)
                if hit is None:
                    continue
                category, score = hit
                if best is None or (score, -form_index) > (best[0], -best[1]):
                    best = (score, form_index, form, category)
            if best is not None:
                score, _, form, category = best
                return CategoryMapping(
                    keyword=keyword,
                    normalized=form,
                    category=category,
                    matcher=matcher,
                    score=score,
                    translated_from=translated_from,
                )
        return CategoryMapping(
            keyword=keyword,
            normalized=forms[0] if forms else "",
            category=None,
            matcher=Matcher.NONE,
            score=0.0,
            translated_from=translated_from,
        )


def aggregate_value(mappings: list[CategoryMapping]) -> ValueCategory:
    """Asset value = maximum sensitivity over the keyword mappings."""
    level = ValueLevel.UNSPECIFIED
    for mapping in mappings:
        if _VALUE_ORDER[mapping.level] > _VALUE_ORDER[level]:
            level = mapping.level
    return ValueCategory(level=level, evidence=list(mappings))
