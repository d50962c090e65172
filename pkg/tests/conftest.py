from __future__ import annotations

from pathlib import Path

import pytest

from secretrisk.categorymap import KeywordMapper
from secretrisk.embedding import load_embeddings
from secretrisk.taxonomy import load_taxonomy
from secretrisk.translate import load_lexicon_translator

CORPUS_DIR = Path(__file__).parent / "corpus"
FIXTURES_DIR = CORPUS_DIR / "fixtures"


@pytest.fixture(scope="session")
def taxonomy():
    return load_taxonomy()


@pytest.fixture(scope="session")
def embedder():
    return load_embeddings()


@pytest.fixture(scope="session")
def translator():
    return load_lexicon_translator()


@pytest.fixture(scope="session")
def mapper(taxonomy, embedder, translator):
    return KeywordMapper(taxonomy, embedder, translator)


def corpus_repos() -> list[Path]:
    return sorted(
        p for p in CORPUS_DIR.iterdir() if p.is_dir() and (p / "expected.json").exists()
    )
