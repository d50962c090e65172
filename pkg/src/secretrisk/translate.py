"""Translation of non-English and transliterated keywords to English."""

from __future__ import annotations

import json
import os
import unicodedata
import urllib.request
from importlib import resources
from pathlib import Path


def _fold(text: str) -> str:
    """Lowercase and strip combining accents: Xìngbié -> xingbie."""
    decomposed = unicodedata.normalize("NFKD", text.lower())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


class LexiconTranslator:
    """Offline translator backed by the bundled transliteration lexicon."""

    def __init__(self, entries: dict[str, str]):
        self._entries = entries

    def translate(self, keyword: str) -> str | None:
        return self._entries.get(_fold(keyword.strip()))

    def knows(self, keyword: str) -> bool:
        return _fold(keyword.strip()) in self._entries


class HttpTranslator:
    """Live translation API client; used only when an API key is configured.

    Falls back to None on any failure so callers proceed untranslated.
    """

    def __init__(self, api_key: str, endpoint: str | None = None, timeout: float = 5.0):
        self.api_key = api_key
        self.endpoint = endpoint or "https://translation.googleapis.com/language/translate/v2"
        self.timeout = timeout
        self.calls = 0

    def translate(self, keyword: str) -> str | None:
        self.calls += 1
        payload = json.dumps({"q": keyword, "target": "en", "format": "text"}).encode()
        req = urllib.request.Request(
            f"{self.endpoint}?key={self.api_key}",
            data=payload,
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                body = json.loads(resp.read().decode("utf-8"))
            return body["data"]["translations"][0]["translatedText"]
        except Exception:
            return None

    def knows(self, keyword: str) -> bool:
        return False


def parse_lexicon(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        source, _, english = line.partition("|")
        if english:
            entries[_fold(source.strip())] = english.strip()
    return entries


def load_lexicon_translator(path: str | Path | None = None) -> LexiconTranslator:
    if path is not None:
        return LexiconTranslator(parse_lexicon(Path(path).read_text(encoding="utf-8")))
    text = resources.files("secretrisk").joinpath("data/lexicon.txt").read_text("utf-8")
    return LexiconTranslator(parse_lexicon(text))


def make_translator(offline: bool, lexicon_path: str | Path | None = None):
    """Lexicon translator offline; live API (if keyed) chained after it otherwise."""
    lexicon = load_lexicon_translator(lexicon_path)
    if offline:
        return lexicon
    api_key = os.environ.get("TRANSLATE_API_KEY")
    if not api_key:
        return lexicon
    return ChainedTranslator([lexicon, HttpTranslator(api_key)])


class ChainedTranslator:
    def __init__(self, providers: list):
        self.providers = providers

    def translate(self, keyword: str) -> str | None:
        for provider in self.providers:
            result = provider.translate(keyword)
            if result:
                return result
        return None

    def knows(self, keyword: str) -> bool:
        return any(p.knows(keyword) for p in self.providers)
