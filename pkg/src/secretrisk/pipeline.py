"""End-to-end scan pipeline: detect pairs, extract keywords, map categories,
grade ease of attack, score, rank, report."""

from __future__ import annotations

import os
from pathlib import Path

from .categorymap import KeywordMapper, MatchCutoffs, ValueLevel, aggregate_value
from .config import ScanConfig
from .dataflow import find_file_open_sql, trace_query_fragments
from .detector import ScanResult, scan_tree
from .embedding import load_embeddings
from .keywords import (
    DatabaseKeywordSet,
    KeywordSource,
    NoSqlExtraction,
    OrmExtraction,
    assemble_keyword_set,
    extract_nosql_keywords,
    extract_orm_keywords,
)
from .model import Diagnostic, SecretAssetPair
from .netinfo import (
    EaseLevel,
    ProbeCache,
    assign_ease,
    evaluate_hosts,
    make_providers,
    target_port,
)
from .report import Report
from .risk import EASE_POINTS, VALUE_POINTS, RiskFinding, compute_risk, rank_findings
from .sinks import SinkCategory, load_sink_specs
from .sqlkeywords import extract_sql_keywords
from .taxonomy import load_taxonomy
from .translate import make_translator


def _value_table(config: ScanConfig) -> dict[ValueLevel, int]:
    return {
        ValueLevel.HIGH: config.value_high,
        ValueLevel.MODERATE: config.value_moderate,
        ValueLevel.LOW: config.value_low,
        ValueLevel.UNSPECIFIED: config.value_unspecified,
    }


def _ease_table(config: ScanConfig) -> dict[EaseLevel, int]:
    return {
        EaseLevel.VERY_DIFFICULT: config.ease_very_difficult,
        EaseLevel.DIFFICULT: config.ease_difficult,
        EaseLevel.MODERATE: config.ease_moderate,
        EaseLevel.EASY: config.ease_easy,
    }


def _pair_extraction_index(
    scan: ScanResult, root: Path, diagnostics: list[Diagnostic]
) -> tuple[dict, dict, dict]:
    """Per-pair keyword extractions keyed by the pair's dedup key."""
    sql_by_pair: dict[tuple, list] = {}
    nosql_by_pair: dict[tuple, list[NoSqlExtraction]] = {}
    orm_by_pair: dict[tuple, list[OrmExtraction]] = {}
    all_graphs = [analysis.graph for analysis in scan.analyses.values()]

    for rel, analysis in sorted(scan.analyses.items()):
        pair_keys = sorted(scan.pair_files.get(rel, set()))
        if not pair_keys:
            continue

        # raw SQL flowing into execute-style sinks: attributed to every pair
        # found in the same file (conservative union)
        for sink in analysis.sinks:
            if sink.spec.category != SinkCategory.SQL_DRIVER:
                continue
            if not sink.spec.is_method or sink.spec.qualified_callable not in (
                ".execute",
                ".executemany",
            ):
                continue
            argument = trace_query_fragments(analysis.graph, sink.call)
            text = argument.render_with_holes()
            if not text.strip():
                continue
            if not argument.fully_resolved:
                diagnostics.append(
                    Diagnostic(
                        "dynamic-query",
                        f"query at line {sink.call.line} is partly dynamic; "
                        "keywords may be incomplete",
                        rel,
                    )
                )
            extraction = extract_sql_keywords(text)
            for message in extraction.diagnostics:
                diagnostics.append(Diagnostic("sql-parse", message, rel))
            for key in pair_keys:
                sql_by_pair.setdefault(key, []).append((extraction, KeywordSource.SQL_QUERY))

        # .sql/.ddl files opened from this file
        for sql_path in find_file_open_sql(analysis.graph):
            resolved = _resolve_sql_path(root, rel, sql_path)
            if resolved is None:
                diagnostics.append(
                    Diagnostic("sql-file", f"referenced SQL file not found: {sql_path}", rel)
                )
                continue
            try:
                sql_text = resolved.read_text(encoding="utf-8", errors="replace")
            except OSError as exc:
                diagnostics.append(Diagnostic("sql-file", f"unreadable: {exc}", rel))
                continue
            extraction = extract_sql_keywords(sql_text)
            for message in extraction.diagnostics:
                diagnostics.append(Diagnostic("sql-parse", message, rel))
            for key in pair_keys:
                sql_by_pair.setdefault(key, []).append((extraction, KeywordSource.SQL_FILE))

        # NoSQL client chains: attributed to the pair built from the client sink
        for key, sink in analysis.sink_pairs:
            if sink.spec.category == SinkCategory.NOSQL_DRIVER:
                extraction = extract_nosql_keywords(analysis.graph, sink)
                for message in extraction.diagnostics:
                    diagnostics.append(Diagnostic("nosql", message, rel))
                nosql_by_pair.setdefault(key, []).append(extraction)
            elif sink.spec.category == SinkCategory.ORM_FRAMEWORK:
                orm_by_pair.setdefault(key, []).append(
                    extract_orm_keywords(all_graphs, sink)
                )
    return sql_by_pair, nosql_by_pair, orm_by_pair


def _resolve_sql_path(root: Path, referencing_file: str, sql_path: str) -> Path | None:
    """Relative to the referencing file's directory first, then the scan root."""
    candidates = [
        (root / referencing_file).parent / sql_path,
        root / sql_path,
    ]
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    return None


def _context_lines(root: Path, pair: SecretAssetPair, width: int = 2) -> str:
    """A few lines around the asset, used by the placeholder classifier."""
    try:
        text = (root / pair.asset_location.path).read_text(
            encoding="utf-8", errors="replace"
        )
    except OSError:
        return ""
    lines = text.splitlines()
    center = pair.asset_location.line
    lo = max(0, center - 1 - width)
    hi = min(len(lines), center + width)
    return "\n".join(lines[lo:hi])


def run(config: ScanConfig, env: dict[str, str] | None = None) -> Report:
    """Execute the full pipeline and return the assembled report."""
    env = dict(os.environ) if env is None else env
    root = Path(config.root)
    diagnostics: list[Diagnostic] = []

    sink_specs = load_sink_specs(config.sinks_file)
    scan = scan_tree(root, config, sink_specs)
    diagnostics.extend(scan.diagnostics)

    taxonomy = load_taxonomy(config.taxonomy_file)
    embedder = load_embeddings(config.vectors_file)
    translator = make_translator(config.offline, config.lexicon_file)
    mapper = KeywordMapper(
        taxonomy,
        embedder,
        translator,
        MatchCutoffs(
            prefix=config.prefix_cutoff,
            substring=config.substring_cutoff,
            semantic=config.semantic_cutoff,
        ),
    )

    sql_by_pair, nosql_by_pair, orm_by_pair = _pair_extraction_index(
        scan, root, diagnostics
    )

    keyword_sets: dict[str, DatabaseKeywordSet] = {}
    for pair in scan.pairs:
        key = pair.dedup_key()
        keyword_sets[pair.pair_id] = assemble_keyword_set(
            pair,
            sql_extractions=sql_by_pair.get(key),
            nosql_extractions=nosql_by_pair.get(key),
            orm_extractions=orm_by_pair.get(key),
        )

    dns_provider, scan_provider, llm, provider_diags = make_providers(config, env)
    for message in provider_diags:
        diagnostics.append(Diagnostic("provider", message))

    cache = ProbeCache(config.cache_path, config.cache_ttl)
    requests: dict[str, tuple] = {}
    context: dict[str, str] = {}
    for pair in scan.pairs:
        key = f"{pair.asset.host}|{target_port(pair.asset) or 0}"
        if key in requests or cache.get(key) is not None:
            continue
        requests[key] = (pair.asset.host, pair.asset)
        if llm is not None:
            context[key] = _context_lines(root, pair)
    probe_diags: list[str] = []
    evidence_by_key = evaluate_hosts(
        requests,
        dns_provider,
        scan_provider,
        llm,
        context,
        probe_diags,
        concurrency=config.probe_concurrency,
    )
    for key, evidence in evidence_by_key.items():
        cache.put(key, evidence)
    cache.flush()
    for message in sorted(probe_diags):
        diagnostics.append(Diagnostic("probe", message))

    value_table = _value_table(config)
    ease_table = _ease_table(config)
    findings: list[RiskFinding] = []
    for pair in scan.pairs:
        keyword_set = keyword_sets[pair.pair_id]
        mappings = [
            mapper.map_keyword(keyword)
            for keyword in sorted(keyword_set.database_names)
            + sorted(keyword_set.table_names)
            + sorted(keyword_set.column_names)
        ]
        value = aggregate_value(mappings)
        evidence = cache.get(f"{pair.asset.host}|{target_port(pair.asset) or 0}")
        ease = assign_ease(evidence, config.ease_mapping)
        value_points = value_table[value.level]
        ease_points = ease_table[ease.level]
        findings.append(
            RiskFinding(
                pair=pair,
                keywords=keyword_set,
                value=value,
                ease=ease,
                value_points=value_points,
                ease_points=ease_points,
                risk_score=compute_risk(value_points, ease_points),
            )
        )
    for message in sorted(set(mapper.diagnostics)):
        diagnostics.append(Diagnostic("category-map", message))

    return Report(config=config, findings=rank_findings(findings), diagnostics=diagnostics)
