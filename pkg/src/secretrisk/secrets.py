"""Secret-finding front end: external findings files and a built-in detector.

The built-in detector flags (a) quoted values assigned to secret-keyword
variables and (b) high-entropy quoted values on any assignment. Placeholder
values like "123456" flow through on purpose; ranking, not detection, decides
what matters.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .model import SourceLocation

FINDINGS_SCHEMA_VERSION = 1

DEFAULT_ENTROPY_THRESHOLD = 3.5
DEFAULT_MIN_SECRET_LENGTH = 6

_SECRET_KEYWORDS = ("password", "passwd", "pwd", "secret", "pass")

_ASSIGNMENT = re.compile(
    r"""(?P<var>[A-Za-z_][A-Za-z0-9_\-]*)\s*[:=]\s*(?P<quote>["'])(?P<value>[^"'\n]+)(?P=quote)"""
)
_DICT_ENTRY = re.compile(
    r"""["'](?P<var>[A-Za-z_][A-Za-z0-9_\-]*)["']\s*:\s*(?P<quote>["'])(?P<value>[^"'\n]+)(?P=quote)"""
)


@dataclass(frozen=True)
class SecretFinding:
    secret: str
    location: SourceLocation
    variable: str | None = None


def shannon_entropy(text: str) -> float:
    if not text:
        return 0.0
    counts = Counter(text)
    size = len(text)
    return -sum((n / size) * math.log2(n / size) for n in counts.values())


def _keyword_named(variable: str) -> bool:
    lowered = variable.lower()
    return any(word in lowered for word in _SECRET_KEYWORDS)


def builtin_find_secrets(
    file_text: str,
    path: str,
    entropy_threshold: float = DEFAULT_ENTROPY_THRESHOLD,
    min_length: int = DEFAULT_MIN_SECRET_LENGTH,
) -> list[SecretFinding]:
    findings: list[SecretFinding] = []
    seen: set[tuple[int, str]] = set()
    for lineno, line in enumerate(file_text.splitlines(), 1):
        for pattern in (_DICT_ENTRY, _ASSIGNMENT):
            for match in pattern.finditer(line):
                variable = match.group("var")
                value = match.group("value")
                if not value or "://" in value:
                    continue  # full connection strings belong to the grammars
                keyword_hit = _keyword_named(variable)
                entropy_hit = (
                    len(value) >= min_length and shannon_entropy(value) >= entropy_threshold
                )
                if not keyword_hit and not entropy_hit:
                    continue
                key = (lineno, value)
                if key in seen:
                    continue
                seen.add(key)
                column = match.start("value") + 1
                findings.append(
                    SecretFinding(
                        secret=value,
                        location=SourceLocation(path=path, line=lineno, column=column),
                        variable=variable,
                    )
                )
    return findings


def load_findings_file(path: str | Path) -> list[SecretFinding]:
    """Read an external findings file.

    Canonical form: {"schema": 1, "findings": [{"path", "line", "secret",
    "variable"?}, ...]}; a bare JSON array is accepted and treated as schema 1.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        schema = data.get("schema")
        if schema != FINDINGS_SCHEMA_VERSION:
            raise ValueError(f"unsupported findings schema: {schema!r}")
        records = data.get("findings", [])
    elif isinstance(data, list):
        records = data
    else:
        raise ValueError("findings file must be a JSON object or array")

    findings: list[SecretFinding] = []
    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise ValueError(f"findings[{index}] is not an object")
        try:
            findings.append(
                SecretFinding(
                    secret=str(record["secret"]),
                    location=SourceLocation(
                        path=str(record["path"]).replace("\\", "/"),
                        line=int(record["line"]),
                        column=int(record.get("column", 1)),
                    ),
                    variable=record.get("variable"),
                )
            )
        except KeyError as exc:
            raise ValueError(f"findings[{index}] missing field {exc}") from exc
    return findings
