"""Ordinal scaling and the multiplicative security risk score."""

from __future__ import annotations

from dataclasses import dataclass, field

from .categorymap import ValueCategory, ValueLevel
from .keywords import DatabaseKeywordSet
from .model import SecretAssetPair
from .netinfo import EaseCategory, EaseLevel

# Point values drawn from the relative-estimation scale {1,2,3,5,8,13,20,40,100}.
VALUE_POINTS: dict[ValueLevel, int] = {
    ValueLevel.HIGH: 100,
    ValueLevel.MODERATE: 40,
    ValueLevel.LOW: 5,
    ValueLevel.UNSPECIFIED: 1,
}

EASE_POINTS: dict[EaseLevel, int] = {
    EaseLevel.VERY_DIFFICULT: 1,
    EaseLevel.DIFFICULT: 8,
    EaseLevel.MODERATE: 40,
    EaseLevel.EASY: 100,
}


def scale_value(level: ValueLevel, table: dict[ValueLevel, int] | None = None) -> int:
    return (table or VALUE_POINTS)[level]


def scale_ease(level: EaseLevel, table: dict[EaseLevel, int] | None = None) -> int:
    return (table or EASE_POINTS)[level]


def compute_risk(value_points: int, ease_points: int) -> int:
    """Security risk = value of asset x ease of attack."""
    return value_points * ease_points


@dataclass
class RiskFinding:
    pair: SecretAssetPair
    keywords: DatabaseKeywordSet
    value: ValueCategory
    ease: EaseCategory
    value_points: int
    ease_points: int
    risk_score: int
    rank: int = 0


def rank_findings(findings: list[RiskFinding]) -> list[RiskFinding]:
    """Stable sort by descending risk score; ties prefer higher value points,
    then path, then line. Ranks are assigned contiguously from 1."""
    ordered = sorted(
        findings,
        key=lambda f: (
            -f.risk_score,
            -f.value_points,
            f.pair.secret_location.path,
            f.pair.secret_location.line,
        ),
    )
    for index, finding in enumerate(ordered, 1):
        finding.rank = index
    return ordered
