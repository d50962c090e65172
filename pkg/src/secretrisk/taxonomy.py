"""Sensitive-data category taxonomy: 113 categories across 7 domains."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path


class Domain(str, Enum):
    PII = "PII"
    SPII = "SPII"
    DEMOGRAPHIC = "DEMOGRAPHIC"
    CREDENTIAL = "CREDENTIAL"
    GOVERNMENT_ID = "GOVERNMENT_ID"
    DOCUMENT = "DOCUMENT"
    CONTEXTUAL_INFORMATION = "CONTEXTUAL_INFORMATION"


class Sensitivity(str, Enum):
    HIGH = "HIGH"
    MODERATE = "MODERATE"
    LOW = "LOW"


SENSITIVITY_RANK: dict[Sensitivity, int] = {
    Sensitivity.HIGH: 3,
    Sensitivity.MODERATE: 2,
    Sensitivity.LOW: 1,
}


@dataclass(frozen=True)
class DataCategory:
    name: str
    domain: Domain
    sensitivity: Sensitivity


class Taxonomy:
    """An immutable, name-indexed collection of data categories."""

    def __init__(self, categories: list[DataCategory]):
        by_name: dict[str, DataCategory] = {}
        for cat in categories:
            if cat.name in by_name:
                raise ValueError(f"duplicate category name: {cat.name}")
            by_name[cat.name] = cat
        self._by_name = by_name
        self.categories: tuple[DataCategory, ...] = tuple(categories)

    def __len__(self) -> int:
        return len(self.categories)

    def __iter__(self):
        return iter(self.categories)

    def get(self, name: str) -> DataCategory | None:
        return self._by_name.get(name)


def parse_taxonomy(text: str) -> Taxonomy:
    """Parse `NAME | DOMAIN | SENSITIVITY` lines; '#' starts a comment."""
    categories = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3:
            raise ValueError(f"taxonomy line {lineno}: expected 3 fields, got {len(parts)}")
        name, domain, sensitivity = parts
        categories.append(
            DataCategory(name=name, domain=Domain(domain), sensitivity=Sensitivity(sensitivity))
        )
    return Taxonomy(categories)


def load_taxonomy(path: str | Path | None = None) -> Taxonomy:
    """Load the bundled taxonomy, or a replacement file when given."""
    if path is not None:
        return parse_taxonomy(Path(path).read_text(encoding="utf-8"))
    text = resources.files("secretrisk").joinpath("data/taxonomy.txt").read_text("utf-8")
    return parse_taxonomy(text)
