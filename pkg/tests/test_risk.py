import random

from hypothesis import given
from hypothesis import strategies as st

from secretrisk.categorymap import ValueCategory, ValueLevel
from secretrisk.keywords import DatabaseKeywordSet
from secretrisk.model import (
    AssetIdentifier,
    DetectionMethod,
    SecretAssetPair,
    SourceLocation,
)
from secretrisk.netinfo import EaseCategory, EaseLevel, HostEvidence
from secretrisk.risk import (
    EASE_POINTS,
    VALUE_POINTS,
    RiskFinding,
    compute_risk,
    rank_findings,
    scale_ease,
    scale_value,
)


def test_value_scale_table_exact():
    assert scale_value(ValueLevel.HIGH) == 100
    assert scale_value(ValueLevel.MODERATE) == 40
    assert scale_value(ValueLevel.LOW) == 5
    assert scale_value(ValueLevel.UNSPECIFIED) == 1


def test_ease_scale_table_exact():
    assert scale_ease(EaseLevel.VERY_DIFFICULT) == 1
    assert scale_ease(EaseLevel.DIFFICULT) == 8
    assert scale_ease(EaseLevel.MODERATE) == 40
    assert scale_ease(EaseLevel.EASY) == 100


def test_worked_examples_exact():
    assert compute_risk(100, 8) == 800
    assert compute_risk(100, 1) == 100  # walkthrough secret A
    assert compute_risk(40, 8) == 320   # walkthrough secret C
    assert compute_risk(5, 8) == 40     # walkthrough secret B
    assert compute_risk(100, 100) == 10000


def test_score_range():
    scores = {
        compute_risk(v, e) for v in VALUE_POINTS.values() for e in EASE_POINTS.values()
    }
    assert min(scores) == 1
    assert max(scores) == 10000
    assert all(1 <= s <= 10000 for s in scores)


def _finding(score: int, value_points: int = 1, path: str = "x", line: int = 1) -> RiskFinding:
    pair = SecretAssetPair(
        secret="secret",
        secret_location=SourceLocation(path, line, 1),
        asset=AssetIdentifier(host="h"),
        asset_location=SourceLocation(path, line, 2),
        detection_method=DetectionMethod.DATA_FLOW,
    )
    return RiskFinding(
        pair=pair,
        keywords=DatabaseKeywordSet(pair_id=pair.pair_id),
        value=ValueCategory(level=ValueLevel.UNSPECIFIED),
        ease=EaseCategory(level=EaseLevel.VERY_DIFFICULT, evidence=HostEvidence("h")),
        value_points=value_points,
        ease_points=1,
        risk_score=score,
    )


def test_rank_order_matches_walkthrough():
    findings = [_finding(100), _finding(40), _finding(320)]
    ranked = rank_findings(findings)
    assert [f.risk_score for f in ranked] == [320, 100, 40]
    assert [f.rank for f in ranked] == [1, 2, 3]


def test_rank_stability_on_equal_scores():
    findings = [_finding(40) for _ in range(5)]
    for index, finding in enumerate(findings):
        finding.pair = SecretAssetPair(
            secret=f"s{index}",
            secret_location=SourceLocation("x", 1, 1),
            asset=AssetIdentifier(host="h"),
            asset_location=SourceLocation("x", 1, 2),
            detection_method=DetectionMethod.DATA_FLOW,
        )
    ranked = rank_findings(list(findings))
    assert [f.pair.secret for f in ranked] == [f"s{i}" for i in range(5)]


def test_rank_ties_prefer_value_points_then_location():
    low_value = _finding(400, value_points=5, path="b.py", line=2)
    high_value = _finding(400, value_points=100, path="a.py", line=9)
    same_value_later = _finding(400, value_points=100, path="a.py", line=30)
    ranked = rank_findings([low_value, same_value_later, high_value])
    assert ranked[0] is high_value
    assert ranked[1] is same_value_later
    assert ranked[2] is low_value


def test_stable_sort_against_reference_on_1000_random_lists():
    rng = random.Random(424242)
    point_values = [1, 5, 8, 40, 100]
    for _ in range(1000):
        size = rng.randint(0, 12)
        findings = []
        for index in range(size):
            value = rng.choice(point_values)
            ease = rng.choice(point_values)
            finding = _finding(value * ease, value_points=value)
            finding.pair = SecretAssetPair(
                secret=f"s{index}",
                secret_location=SourceLocation("x", 1, 1),
                asset=AssetIdentifier(host="h"),
                asset_location=SourceLocation("x", 1, 2),
                detection_method=DetectionMethod.DATA_FLOW,
            )
            findings.append(finding)
        reference = sorted(
            enumerate(findings), key=lambda e: (-e[1].risk_score, -e[1].value_points, e[0])
        )
        ranked = rank_findings(list(findings))
        assert [f.pair.secret for f in ranked] == [f.pair.secret for _, f in reference]
        assert [f.rank for f in ranked] == list(range(1, size + 1))


def test_empty_list_ranks_to_empty():
    assert rank_findings([]) == []


_VALUE_LEVELS = [ValueLevel.UNSPECIFIED, ValueLevel.LOW, ValueLevel.MODERATE, ValueLevel.HIGH]
_EASE_LEVELS = [
    EaseLevel.VERY_DIFFICULT,
    EaseLevel.DIFFICULT,
    EaseLevel.MODERATE,
    EaseLevel.EASY,
]


@given(
    st.sampled_from(_VALUE_LEVELS),
    st.sampled_from(_EASE_LEVELS),
    st.sampled_from(_VALUE_LEVELS),
    st.sampled_from(_EASE_LEVELS),
)
def test_score_monotonic_in_both_levels(v1, e1, v2, e2):
    score1 = compute_risk(scale_value(v1), scale_ease(e1))
    score2 = compute_risk(scale_value(v2), scale_ease(e2))
    if _VALUE_LEVELS.index(v2) >= _VALUE_LEVELS.index(v1) and _EASE_LEVELS.index(
        e2
    ) >= _EASE_LEVELS.index(e1):
        assert score2 >= score1


@given(st.integers(min_value=1, max_value=1000))
def test_common_scaling_never_changes_ranking(factor):
    """Relative semantics: scaling both tables by a positive constant keeps order."""
    combos = [
        (scale_value(v), scale_ease(e)) for v in _VALUE_LEVELS for e in _EASE_LEVELS
    ]
    base = sorted(range(len(combos)), key=lambda i: -compute_risk(*combos[i]))
    scaled = sorted(
        range(len(combos)),
        key=lambda i: -compute_risk(combos[i][0] * factor, combos[i][1] * factor),
    )
    assert base == scaled
