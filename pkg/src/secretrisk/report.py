"""Report assembly and emission (stable JSON and a human-readable table)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from . import __version__
from .config import ScanConfig
from .model import Diagnostic
from .risk import RiskFinding

REPORT_SCHEMA_VERSION = 1


def mask_secret(secret: str) -> str:
    """First two and last two characters survive; the middle is starred."""
    if len(secret) <= 4:
        return "*" * len(secret)
    return secret[:2] + "*" * (len(secret) - 4) + secret[-2:]


@dataclass
class Report:
    config: ScanConfig
    findings: list[RiskFinding]
    diagnostics: list[Diagnostic] = field(default_factory=list)
    tool_version: str = __version__

    def summary(self) -> dict:
        by_value: dict[str, int] = {}
        by_ease: dict[str, int] = {}
        for finding in self.findings:
            by_value[finding.value.level.value] = by_value.get(finding.value.level.value, 0) + 1
            by_ease[finding.ease.level.value] = by_ease.get(finding.ease.level.value, 0) + 1
        return {
            "total_findings": len(self.findings),
            "by_value_level": dict(sorted(by_value.items())),
            "by_ease_level": dict(sorted(by_ease.items())),
        }

    def max_risk_score(self) -> int:
        return max((f.risk_score for f in self.findings), default=0)

    def exit_code(self) -> int:
        if any(f.risk_score >= self.config.alert_threshold for f in self.findings):
            return 2
        return 0


def _config_dict(config: ScanConfig) -> dict:
    data = {}
    for f in fields(config):
        if f.name == "overridden":
            continue
        data[f.name] = getattr(config, f.name)
    data["overridden"] = sorted(config.overridden)
    return data


def _location_dict(location) -> dict:
    return {"path": location.path, "line": location.line, "column": location.column}


def _finding_dict(finding: RiskFinding, reveal_secrets: bool) -> dict:
    pair = finding.pair
    secret = pair.secret if reveal_secrets else mask_secret(pair.secret)
    keywords = finding.keywords
    evidence = finding.ease.evidence
    return {
        "rank": finding.rank,
        "risk_score": finding.risk_score,
        "value_points": finding.value_points,
        "ease_points": finding.ease_points,
        "value_level": finding.value.level.value,
        "ease_level": finding.ease.level.value,
        "pair": {
            "pair_id": pair.pair_id,
            "secret": secret,
            "secret_location": _location_dict(pair.secret_location),
            "asset": {
                "host": pair.asset.host,
                "port": pair.asset.port,
                "database_name": pair.asset.database_name,
                "db_type": pair.asset.db_type.value,
            },
            "asset_location": _location_dict(pair.asset_location),
            "detection_method": pair.detection_method.value,
        },
        "keywords": {
            "database_names": sorted(keywords.database_names),
            "table_names": sorted(keywords.table_names),
            "column_names": sorted(keywords.column_names),
            "provenance": {
                keyword: sorted(source.value for source in sources)
                for keyword, sources in sorted(keywords.sources.items())
            },
        },
        "value_evidence": [
            {
                "keyword": m.keyword,
                "normalized": m.normalized,
                "category": m.category.name if m.category else None,
                "domain": m.category.domain.value if m.category else None,
                "sensitivity": m.category.sensitivity.value if m.category else "UNSPECIFIED",
                "matcher": m.matcher.value,
                "score": round(m.score, 6),
                "translated_from": m.translated_from,
            }
            for m in sorted(finding.value.evidence, key=lambda m: m.keyword)
        ],
        "ease_evidence": {
            "raw_host": evidence.raw_host,
            "is_placeholder": evidence.is_placeholder,
            "valid_dns": evidence.valid_dns,
            "resolved_ip": evidence.resolved_ip,
            "valid_ip": evidence.valid_ip,
            "routable": evidence.routable,
            "scannable": evidence.scannable,
            "open_ports": sorted(evidence.open_ports),
            "target_port": evidence.target_port,
            "db_port_open": evidence.db_port_open,
            "counter": evidence.counter,
        },
    }


def emit_json(report: Report, reveal_secrets: bool | None = None) -> str:
    """Schema-versioned, stable-key-ordered, newline-terminated JSON."""
    reveal = report.config.reveal_secrets if reveal_secrets is None else reveal_secrets
    payload = {
        "schema": REPORT_SCHEMA_VERSION,
        "tool": {"name": "secretrisk", "version": report.tool_version},
        "config": _config_dict(report.config),
        "summary": report.summary(),
        "findings": [_finding_dict(f, reveal) for f in report.findings],
        "diagnostics": [
            {"code": d.code, "path": d.path, "message": d.message}
            for d in sorted(report.diagnostics, key=lambda d: d.sort_key())
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def emit_table(report: Report) -> str:
    """Human-readable ranked table; secrets always masked here."""
    header = f"secretrisk {report.tool_version} — {len(report.findings)} finding(s)"
    lines = [header]
    overridden = sorted(report.config.overridden)
    if overridden:
        lines.append("non-default config: " + ", ".join(overridden))
    lines.append("")
    columns = ("RANK", "SCORE", "VALUE", "EASE", "SECRET", "HOST", "LOCATION")
    rows = [columns]
    for finding in report.findings:
        pair = finding.pair
        rows.append(
            (
                str(finding.rank),
                str(finding.risk_score),
                finding.value.level.value,
                finding.ease.level.value,
                mask_secret(pair.secret),
                pair.asset.host,
                f"{pair.secret_location.path}:{pair.secret_location.line}",
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(columns))]
    for index, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    if report.diagnostics:
        lines.append("")
        lines.append(f"{len(report.diagnostics)} diagnostic(s):")
        for diagnostic in sorted(report.diagnostics, key=lambda d: d.sort_key()):
            location = f" [{diagnostic.path}]" if diagnostic.path else ""
            lines.append(f"  {diagnostic.code}{location}: {diagnostic.message}")
    return "\n".join(lines) + "\n"
