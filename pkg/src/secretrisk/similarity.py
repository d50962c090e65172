"""Lexical string similarity measures used by the category matchers."""

from __future__ import annotations

from difflib import SequenceMatcher

# Winkler prefix bonus: scale per shared prefix char (max 4), applied only
# when the base Jaro score already exceeds the boost threshold.
_PREFIX_SCALE = 0.1
_BOOST_THRESHOLD = 0.7
_PREFIX_CAP = 4


def jaro_similarity(s1: str, s2: str) -> float:
    """Jaro similarity in [0, 1]: common characters within a sliding window,
    discounted by transpositions."""
    if s1 == s2:
        return 1.0
    len1, len2 = len(s1), len(s2)
    if not len1 or not len2:
        return 0.0

    window = max(len1, len2) // 2 - 1
    if window < 0:
        window = 0

    flags1 = [False] * len1
    flags2 = [False] * len2
    common = 0
    for i in range(len1):
        lo = max(0, i - window)
        hi = min(len2, i + window + 1)
        for j in range(lo, hi):
            if not flags2[j] and s2[j] == s1[i]:
                flags1[i] = True
                flags2[j] = True
                common += 1
                break
    if common == 0:
        return 0.0

    # Count transpositions over the two matched subsequences.
    k = 0
    half_transpositions = 0
    for i in range(len1):
        if not flags1[i]:
            continue
        while not flags2[k]:
            k += 1
        if s1[i] != s2[k]:
            half_transpositions += 1
        k += 1
    transpositions = half_transpositions / 2

    return (
        common / len1 + common / len2 + (common - transpositions) / common
    ) / 3


def jaro_winkler_similarity(s1: str, s2: str) -> float:
    """Jaro score boosted for a shared prefix of up to 4 characters."""
    score = jaro_similarity(s1, s2)
    if score > _BOOST_THRESHOLD:
        prefix = 0
        for a, b in zip(s1[:_PREFIX_CAP], s2[:_PREFIX_CAP]):
            if a != b:
                break
            prefix += 1
        score += prefix * _PREFIX_SCALE * (1.0 - score)
    return score


def ratcliff_obershelp_similarity(s1: str, s2: str) -> float:
    """Gestalt pattern-matching ratio: twice the matched character count over
    the total length, matching recursively around the longest common block."""
    if not s1 and not s2:
        return 1.0
    return SequenceMatcher(None, s1, s2, autojunk=False).ratio()
