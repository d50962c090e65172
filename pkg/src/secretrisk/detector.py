"""Locate secret-asset pairs in a source tree.

Three routes feed the same pair stream: connection-string pattern matching on
any text file, data-flow analysis into driver sinks for Python files, and a
neighboring-line heuristic over front-end secret findings. Duplicates collapse
with method precedence ConnectionString > DataFlow > NeighborHeuristic.
"""

from __future__ import annotations

import ipaddress
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .config import ScanConfig
from .dataflow import DefUseGraph, Fragment, analyze_source
from .grammars import (
    BUILTIN_GRAMMARS,
    ConnectionStringGrammar,
    GrammarGroup,
    scheme_db_type,
)
from .model import (
    METHOD_PRECEDENCE,
    AssetIdentifier,
    DbType,
    DetectionMethod,
    Diagnostic,
    SecretAssetPair,
    SourceLocation,
)
from .secrets import SecretFinding, builtin_find_secrets, load_findings_file
from .sinks import DriverSinkSpec, SinkMatch, find_sinks, load_sink_specs, sink_db_type


class ScanError(Exception):
    """Fatal scan problem (unreadable root, bad configuration)."""


_SKIP_DIRS = {
    ".git", ".hg", ".svn", "__pycache__", "node_modules",
    ".venv", "venv", ".tox", ".mypy_cache", ".pytest_cache",
}

_HOST_PREFIX_DB_TYPES = (
    ("mysql", DbType.MYSQL),
    ("maria", DbType.MYSQL),
    ("postgres", DbType.POSTGRESQL),
    ("pgsql", DbType.POSTGRESQL),
    ("pg", DbType.POSTGRESQL),
    ("mongo", DbType.MONGODB),
    ("mssql", DbType.SQLSERVER),
    ("sqlserver", DbType.SQLSERVER),
)

_DNS_NAME = re.compile(
    r"^[A-Za-z0-9]([A-Za-z0-9-]*[A-Za-z0-9])?(\.[A-Za-z0-9]([A-Za-z0-9-]*[A-Za-z0-9])?)+$"
)
_HOST_ASSIGN = re.compile(
    r"""(?:["'](?P<qvar>[A-Za-z_][A-Za-z0-9_\-]*)["']\s*:|(?P<var>[A-Za-z_][A-Za-z0-9_\-]*)\s*[:=])\s*["'](?P<value>[^"'\n]+)["']"""
)


def _line_offsets(text: str) -> list[int]:
    offsets = [0]
    for index, char in enumerate(text):
        if char == "\n":
            offsets.append(index + 1)
    return offsets


def _offset_location(offsets: list[int], offset: int, path: str) -> SourceLocation:
    import bisect

    line = bisect.bisect_right(offsets, offset)
    column = offset - offsets[line - 1] + 1
    return SourceLocation(path=path, line=line, column=column)


def _valid_port(raw: str | None) -> int | None:
    if raw is None:
        return None
    try:
        port = int(raw)
    except ValueError:
        return None
    return port if 1 <= port <= 65535 else None


def match_connection_strings(
    file_text: str,
    grammars: tuple[ConnectionStringGrammar, ...] = BUILTIN_GRAMMARS,
    path: str = "<memory>",
) -> list[SecretAssetPair]:
    """All grammar matches in one file, one pair per match with a secret."""
    if not grammars:
        raise ValueError("grammars must be non-empty")
    offsets = _line_offsets(file_text)
    pairs: list[SecretAssetPair] = []
    for grammar in grammars:
        for match in grammar.pattern.finditer(file_text):
            fields = match.groupdict()
            password = fields.get("password")
            host = fields.get("host")
            if not password or not host:
                continue
            db_type = scheme_db_type(fields.get("scheme"), grammar.db_type_hint)
            host_value, port = host, _valid_port(fields.get("port"))
            if "," in host_value:  # SQL Server "host,port" notation
                head, _, tail = host_value.partition(",")
                host_value, port = head.strip(), _valid_port(tail.strip()) or port
            asset = AssetIdentifier(
                host=host_value.strip(),
                port=port,
                database_name=(fields.get("db") or "").strip() or None,
                db_type=db_type,
            )
            secret_loc = _offset_location(offsets, match.start("password"), path)
            asset_loc = _offset_location(offsets, match.start("host"), path)
            pairs.append(
                SecretAssetPair(
                    secret=password,
                    secret_location=secret_loc,
                    asset=asset,
                    asset_location=asset_loc,
                    detection_method=DetectionMethod.CONNECTION_STRING,
                )
            )
    pairs.sort(key=lambda p: (p.secret_location.line, p.secret_location.column, p.pair_id))
    return pairs


# --- neighboring-line heuristic ----------------------------------------------


def _is_host_token(value: str) -> tuple[str, int | None] | None:
    """(host, port) when the quoted value looks like an IP or DNS name."""
    text = value.strip()
    port = None
    host_part, sep, tail = text.rpartition(":")
    if sep and tail.isdigit() and ("." in host_part or host_part == "localhost"):
        maybe_port = _valid_port(tail)
        if maybe_port is not None:
            text, port = host_part, maybe_port
    if text == "localhost":
        return text, port
    try:
        ipaddress.ip_address(text)
        return text, port
    except ValueError:
        pass
    if _DNS_NAME.match(text) and not text.replace(".", "").isdigit():
        return text, port
    return None


def _normalized_var(name: str) -> str:
    return re.sub(r"[\s\-.]+", "_", name.strip().lower())


def _common_prefix_len(a: str, b: str) -> int:
    return len(os.path.commonprefix([_normalized_var(a), _normalized_var(b)]))


def _prefix_db_type(prefix: str) -> DbType:
    for token, db_type in _HOST_PREFIX_DB_TYPES:
        if prefix.startswith(token):
            return db_type
    return DbType.UNKNOWN


def heuristic_detect(
    secrets: list[SecretFinding],
    file_lines: list[str],
    path: str = "<memory>",
    window: int = 3,
    min_prefix: int = 3,
) -> list[SecretAssetPair]:
    """Pair each secret with the nearest host assignment within ±window lines
    whose variable name shares a prefix of at least ``min_prefix`` chars."""
    pairs: list[SecretAssetPair] = []
    for finding in secrets:
        if not finding.variable:
            continue
        secret_line = finding.location.line
        offsets_order = [0] + [
            sign * distance for distance in range(1, window + 1) for sign in (-1, 1)
        ]
        chosen = None
        for offset in offsets_order:
            lineno = secret_line + offset
            if not 1 <= lineno <= len(file_lines):
                continue
            line = file_lines[lineno - 1]
            for match in _HOST_ASSIGN.finditer(line):
                variable = match.group("var") or match.group("qvar")
                host_info = _is_host_token(match.group("value"))
                if host_info is None or variable is None:
                    continue
                if variable == finding.variable and lineno == secret_line:
                    continue
                prefix_len = _common_prefix_len(finding.variable, variable)
                if prefix_len < min_prefix:
                    continue
                host, port = host_info
                if host == finding.secret:
                    continue
                chosen = (lineno, match.start("value") + 1, host, port, prefix_len)
                break
            if chosen:
                break
        if not chosen:
            continue
        lineno, column, host, port, prefix_len = chosen
        shared = _normalized_var(finding.variable)[:prefix_len]
        pairs.append(
            SecretAssetPair(
                secret=finding.secret,
                secret_location=finding.location,
                asset=AssetIdentifier(
                    host=host, port=port, db_type=_prefix_db_type(shared)
                ),
                asset_location=SourceLocation(path=path, line=lineno, column=column),
                detection_method=DetectionMethod.NEIGHBOR_HEURISTIC,
            )
        )
    return pairs


# --- data-flow pairs -----------------------------------------------------------


def _fragment_location(
    fragments: tuple[Fragment, ...], path: str, fallback: SourceLocation
) -> SourceLocation:
    for fragment in fragments:
        if fragment.location is not None:
            return SourceLocation(
                path=path, line=fragment.location[0], column=fragment.location[1]
            )
    return fallback


def _offset_in_fragments(
    fragments: tuple[Fragment, ...], offset: int, path: str, fallback: SourceLocation
) -> SourceLocation:
    consumed = 0
    for fragment in fragments:
        length = len(fragment.text or "")
        if consumed <= offset < consumed + length and fragment.location is not None:
            line, column = fragment.location
            return SourceLocation(path=path, line=line, column=column + (offset - consumed))
        consumed += length
    return fallback


def pairs_from_sinks(
    matches: list[SinkMatch],
    path: str,
    grammars: tuple[ConnectionStringGrammar, ...] = BUILTIN_GRAMMARS,
) -> list[tuple[SecretAssetPair, SinkMatch]]:
    """Build DataFlow pairs from resolved sink arguments."""
    results: list[tuple[SecretAssetPair, SinkMatch]] = []
    for match in matches:
        call_loc = SourceLocation(path=path, line=match.call.line, column=match.call.column)
        host_arg = match.role_argument("host")
        password_arg = match.role_argument("password")
        connection_arg = match.role_argument("connection_string")

        # a "host" that is really a URI is handed to the grammars instead
        host_value = host_arg.value if host_arg is not None else None
        if host_value and "://" in host_value:
            connection_arg = connection_arg or host_arg
            host_arg = None

        if host_arg is not None and password_arg is not None:
            host = host_arg.value
            secret = password_arg.value
            if not host or not secret:
                continue
            port_arg = match.role_argument("port")
            port = _valid_port(port_arg.value) if port_arg is not None else None
            database_arg = match.role_argument("database")
            database = database_arg.value if database_arg is not None else None
            pair = SecretAssetPair(
                secret=secret,
                secret_location=_fragment_location(password_arg.fragments, path, call_loc),
                asset=AssetIdentifier(
                    host=host,
                    port=port,
                    database_name=database or None,
                    db_type=sink_db_type(match),
                ),
                asset_location=_fragment_location(host_arg.fragments, path, call_loc),
                detection_method=DetectionMethod.DATA_FLOW,
            )
            results.append((pair, match))
            continue

        if connection_arg is None or not connection_arg.fully_resolved:
            continue
        text = connection_arg.value or ""
        for grammar in grammars:
            found = grammar.pattern.search(text)
            if found is None:
                continue
            fields = found.groupdict()
            password = fields.get("password")
            host = fields.get("host")
            if not password or not host:
                continue
            pair = SecretAssetPair(
                secret=password,
                secret_location=_offset_in_fragments(
                    connection_arg.fragments, found.start("password"), path, call_loc
                ),
                asset=AssetIdentifier(
                    host=host,
                    port=_valid_port(fields.get("port")),
                    database_name=(fields.get("db") or "").strip() or None,
                    db_type=scheme_db_type(
                        fields.get("scheme"),
                        grammar.db_type_hint
                        if grammar.db_type_hint != DbType.UNKNOWN
                        else sink_db_type(match),
                    ),
                ),
                asset_location=_offset_in_fragments(
                    connection_arg.fragments, found.start("host"), path, call_loc
                ),
                detection_method=DetectionMethod.DATA_FLOW,
            )
            results.append((pair, match))
            break
    return results


# --- dedup and repository scan -------------------------------------------------


def dedup_pairs(pairs: list[SecretAssetPair]) -> list[SecretAssetPair]:
    """Collapse pairs with identical (secret, host, port, db, file); the method
    with the highest precedence survives."""
    best: dict[tuple, SecretAssetPair] = {}
    for pair in pairs:
        key = pair.dedup_key()
        current = best.get(key)
        if current is None:
            best[key] = pair
            continue
        contender = (
            METHOD_PRECEDENCE[pair.detection_method],
            pair.secret_location.line,
            pair.secret_location.column,
        )
        incumbent = (
            METHOD_PRECEDENCE[current.detection_method],
            current.secret_location.line,
            current.secret_location.column,
        )
        if contender < incumbent:
            best[key] = pair
    ordered = sorted(
        best.values(),
        key=lambda p: (
            p.secret_location.path,
            p.secret_location.line,
            p.secret_location.column,
            p.pair_id,
        ),
    )
    return ordered


@dataclass
class FileAnalysis:
    path: str
    graph: DefUseGraph
    sinks: list[SinkMatch] = field(default_factory=list)
    # dedup-key of each pair built from a sink, for keyword attribution
    sink_pairs: list[tuple[tuple, SinkMatch]] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)


@dataclass
class ScanResult:
    pairs: list[SecretAssetPair]
    analyses: dict[str, FileAnalysis]
    diagnostics: list[Diagnostic]
    pair_files: dict[str, set[tuple]] = field(default_factory=dict)


def _iter_files(root: Path) -> list[Path]:
    files: list[Path] = []
    for current, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(d for d in dirnames if d not in _SKIP_DIRS)
        for name in sorted(filenames):
            files.append(Path(current) / name)
    return files


def _looks_binary(path: Path) -> bool:
    try:
        with path.open("rb") as handle:
            return b"\x00" in handle.read(8192)
    except OSError:
        return True


def scan_tree(
    root: str | Path,
    config: ScanConfig | None = None,
    sink_specs: list[DriverSinkSpec] | None = None,
) -> ScanResult:
    """Full repository scan keeping per-file analyses for keyword extraction."""
    config = config or ScanConfig()
    root_path = Path(root)
    if not root_path.is_dir() or not os.access(root_path, os.R_OK):
        raise ScanError(f"scan root is not a readable directory: {root}")
    if sink_specs is None:
        sink_specs = load_sink_specs(config.sinks_file)

    diagnostics: list[Diagnostic] = []
    external: dict[str, list[SecretFinding]] = {}
    if config.findings_file:
        try:
            for finding in load_findings_file(config.findings_file):
                external.setdefault(finding.location.path, []).append(finding)
        except (OSError, ValueError) as exc:
            diagnostics.append(
                Diagnostic("findings-file", f"could not load findings file: {exc}")
            )

    all_pairs: list[SecretAssetPair] = []
    analyses: dict[str, FileAnalysis] = {}
    pair_files: dict[str, set[tuple]] = {}

    for file_path in _iter_files(root_path):
        rel = file_path.relative_to(root_path).as_posix()
        try:
            size = file_path.stat().st_size
        except OSError as exc:
            diagnostics.append(Diagnostic("unreadable", f"stat failed: {exc}", rel))
            continue
        if size > config.max_file_size:
            diagnostics.append(Diagnostic("size-cap", f"skipped ({size} bytes)", rel))
            continue
        if _looks_binary(file_path):
            continue
        try:
            text = file_path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            diagnostics.append(Diagnostic("unreadable", f"read failed: {exc}", rel))
            continue

        file_pairs: list[SecretAssetPair] = []
        file_pairs.extend(match_connection_strings(text, BUILTIN_GRAMMARS, rel))

        analysis: FileAnalysis | None = None
        if file_path.suffix == ".py":
            graph = analyze_source(text, path=rel)
            sinks = find_sinks(graph, sink_specs)
            analysis = FileAnalysis(path=rel, graph=graph, sinks=sinks, lines=text.splitlines())
            for warning in graph.warnings:
                diagnostics.append(Diagnostic("parse", warning, rel))
            for sink in sinks:
                for warning in sink.warnings:
                    diagnostics.append(Diagnostic("sink", warning, rel))
            for pair, sink in pairs_from_sinks(sinks, rel):
                file_pairs.append(pair)
                analysis.sink_pairs.append((pair.dedup_key(), sink))
            analyses[rel] = analysis

        secrets = list(external.get(rel, []))
        secrets.extend(
            builtin_find_secrets(
                text, rel, config.entropy_threshold, config.min_secret_length
            )
        )
        file_pairs.extend(
            heuristic_detect(
                secrets,
                text.splitlines(),
                rel,
                window=config.neighbor_window,
                min_prefix=config.min_prefix_len,
            )
        )

        for pair in file_pairs:
            pair_files.setdefault(rel, set()).add(pair.dedup_key())
        all_pairs.extend(file_pairs)

    deduped = dedup_pairs(all_pairs)
    return ScanResult(
        pairs=deduped, analyses=analyses, diagnostics=diagnostics, pair_files=pair_files
    )


def scan_repository(root: str | Path, config: ScanConfig | None = None) -> list[SecretAssetPair]:
    """Deduplicated pairs from all detection routes, ordered by path then line."""
    return scan_tree(root, config).pairs
