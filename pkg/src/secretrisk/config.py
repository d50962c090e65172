"""Scan configuration: defaults, config-file parsing, and CLI merging.

Precedence: CLI flags over config file over built-in defaults. Every override
is tracked so the report can flag non-default settings.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

DEFAULT_ALERT_THRESHOLD = 800  # the worked-example score: HIGH x DIFFICULT
DEFAULT_MAX_FILE_SIZE = 1024 * 1024
DEFAULT_NEIGHBOR_WINDOW = 3
DEFAULT_MIN_PREFIX_LEN = 3


@dataclass(frozen=True)
class ScanConfig:
    root: str = "."
    offline: bool = False
    output_format: str = "table"  # table | json
    reveal_secrets: bool = False
    findings_file: str | None = None
    alert_threshold: int = DEFAULT_ALERT_THRESHOLD

    # detector
    neighbor_window: int = DEFAULT_NEIGHBOR_WINDOW
    min_prefix_len: int = DEFAULT_MIN_PREFIX_LEN
    max_file_size: int = DEFAULT_MAX_FILE_SIZE
    entropy_threshold: float = 3.5
    min_secret_length: int = 6

    # category matching cutoffs
    prefix_cutoff: float = 0.7
    substring_cutoff: float = 0.7
    semantic_cutoff: float = 0.65

    # ease-of-attack
    ease_mapping: str = "Prose"  # Prose | Table3
    probe_concurrency: int = 8
    cache_ttl: int = 24 * 3600
    cache_path: str | None = None
    dns_fixtures: str | None = None
    scan_fixtures: str | None = None

    # ordinal scale overrides
    value_high: int = 100
    value_moderate: int = 40
    value_low: int = 5
    value_unspecified: int = 1
    ease_very_difficult: int = 1
    ease_difficult: int = 8
    ease_moderate: int = 40
    ease_easy: int = 100

    # data file overrides
    taxonomy_file: str | None = None
    vectors_file: str | None = None
    sinks_file: str | None = None
    lexicon_file: str | None = None

    overridden: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        for name in ("prefix_cutoff", "substring_cutoff", "semantic_cutoff"):
            cutoff = getattr(self, name)
            if not 0.0 < cutoff <= 1.0:
                raise ValueError(f"{name} must be in (0, 1]")
        if self.neighbor_window < 0:
            raise ValueError("neighbor_window must be >= 0")
        if self.output_format not in ("table", "json"):
            raise ValueError(f"unknown output format: {self.output_format}")
        if self.ease_mapping not in ("Prose", "Table3"):
            raise ValueError(f"unknown ease mapping: {self.ease_mapping}")


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, raw: str, target_type: type):
    if target_type is bool:
        lowered = raw.strip().lower()
        if lowered in _BOOL_TRUE:
            return True
        if lowered in _BOOL_FALSE:
            return False
        raise ValueError(f"config key {name}: expected a boolean, got {raw!r}")
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw


def _field_types() -> dict[str, type]:
    """Infer each config key's type from its default value."""
    defaults = ScanConfig()
    types: dict[str, type] = {}
    for f in fields(ScanConfig):
        if f.name == "overridden":
            continue
        default_value = getattr(defaults, f.name)
        if isinstance(default_value, bool):
            types[f.name] = bool
        elif isinstance(default_value, int):
            types[f.name] = int
        elif isinstance(default_value, float):
            types[f.name] = float
        else:
            types[f.name] = str
    return types


def parse_config_file(path: str | Path) -> dict[str, object]:
    """Flat `key = value` lines; '#' comments; keys match ScanConfig fields."""
    known = _field_types()
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected key = value")
        key = key.strip()
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value.strip(), known[key])
    return values


def build_config(
    cli_values: dict[str, object] | None = None,
    config_file: str | Path | None = None,
) -> ScanConfig:
    """Merge defaults <- config file <- CLI values, tracking overrides."""
    merged: dict[str, object] = {}
    overridden: set[str] = set()
    if config_file is not None:
        for key, value in parse_config_file(config_file).items():
            merged[key] = value
            overridden.add(key)
    for key, value in (cli_values or {}).items():
        if value is None:
            continue
        merged[key] = value
        overridden.add(key)
    config = ScanConfig(**merged)
    defaults = ScanConfig()
    truly_overridden = {
        key for key in overridden if getattr(config, key) != getattr(defaults, key)
    }
    return replace(config, overridden=frozenset(truly_overridden))
