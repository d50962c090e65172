"""Command-line interface.

Exit codes: 0 success, 1 fatal configuration or I/O error, 2 when any finding
reaches the alert threshold.
"""

from __future__ import annotations

import argparse
import sys

from .config import build_config
from .detector import ScanError
from .pipeline import run
from .report import emit_json, emit_table


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secretrisk",
        description=(
            "Scan a source tree for hard-coded database secrets and rank them "
            "by security risk (asset value x ease of attack)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="scan a repository working tree")
    scan.add_argument("root", help="directory to scan")
    scan.add_argument("--offline", action="store_true", default=None,
                      help="fixture/rule-based providers only; no network")
    scan.add_argument("--format", dest="output_format", choices=("table", "json"),
                      default=None, help="report format (default: table)")
    scan.add_argument("--findings", dest="findings_file", metavar="FILE", default=None,
                      help="external secret findings file (JSON)")
    scan.add_argument("--config", dest="config_file", metavar="FILE", default=None,
                      help="flat key=value config file")
    scan.add_argument("--reveal-secrets", action="store_true", default=None,
                      help="include full secrets in JSON output")
    scan.add_argument("--alert-threshold", dest="alert_threshold", type=int, default=None,
                      metavar="N", help="exit 2 when any score reaches N (default 800)")
    scan.add_argument("--ease-mapping", dest="ease_mapping",
                      choices=("Prose", "Table3"), default=None,
                      help="grading for scannable hosts with a closed DB port")
    scan.add_argument("--dns-fixtures", dest="dns_fixtures", metavar="FILE", default=None,
                      help="DNS fixture table for offline resolution")
    scan.add_argument("--scan-fixtures", dest="scan_fixtures", metavar="FILE", default=None,
                      help="scan-database fixture table for offline probing")
    scan.add_argument("--out", metavar="FILE", default=None,
                      help="write the report to FILE instead of stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    cli_values = {
        "root": args.root,
        "offline": args.offline,
        "output_format": args.output_format,
        "findings_file": args.findings_file,
        "reveal_secrets": args.reveal_secrets,
        "alert_threshold": args.alert_threshold,
        "ease_mapping": args.ease_mapping,
        "dns_fixtures": args.dns_fixtures,
        "scan_fixtures": args.scan_fixtures,
    }
    try:
        config = build_config(cli_values, args.config_file)
    except (OSError, ValueError) as exc:
        print(f"secretrisk: configuration error: {exc}", file=sys.stderr)
        return 1

    try:
        report = run(config)
    except ScanError as exc:
        print(f"secretrisk: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"secretrisk: I/O error: {exc}", file=sys.stderr)
        return 1

    output = emit_json(report) if config.output_format == "json" else emit_table(report)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(output)
        except OSError as exc:
            print(f"secretrisk: cannot write report: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(output)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
