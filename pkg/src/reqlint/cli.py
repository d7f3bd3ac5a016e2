"""Command-line entry point: ``reqlint lint|stats|agreement|validate|serve``."""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence, TextIO

from . import analytics
from .catalog import Accuracy, Catalog, Reason, load_catalog
from .checkers import Resources
from .docmodel import DocConfig, parse_document
from .engine import Report, lint, merge_reports
from .errors import FormatError, ReqlintError, ValidationError
from .nlp import load_resources

log = logging.getLogger("reqlint")

EXIT_CLEAN, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2


class OutputFormat(str, enum.Enum):
    Human = "human"
    Json = "json"


def read_config(path: str | Path) -> DocConfig:
    """Read ``key = value`` lines (``#`` comments) into a DocConfig."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read config: {exc.strerror}", path) from None
    known = {f.name for f in dataclasses.fields(DocConfig)}
    values = {}
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise FormatError("expected 'key = value'", path, lineno)
        if key not in known:
            raise FormatError(f"unknown config key {key!r}", path, lineno)
        values[key] = value
    config = DocConfig(**values)
    try:
        config.validate()
    except (ReqlintError, ValueError) as exc:
        raise FormatError(str(exc), path) from None
    return config


def _dump_json(obj, out: TextIO) -> None:
    out.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


# --------------------------------------------------------------------------
# lint


def _lint_one(path: Path, catalog: Catalog, resources: Resources, config: DocConfig) -> Report:
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read document: {exc.strerror}", path) from None
    doc = parse_document(source, config, name=str(path))
    return lint(doc, catalog, resources, config=config, nlp_resources=load_resources())


def format_report_human(report: Report) -> str:
    lines = []
    for f in report.findings:
        line = f"{f.document}:{f.block}:{f.span.start}-{f.span.end}: [{f.rule_id}] {f.accuracy.value}: {f.message}"
        if f.suggestion:
            line += f" (suggestion: {f.suggestion})"
        lines.append(line)
    for rid, reason in report.skipped:
        lines.append(f"skipped rule {rid}: {reason.short} {reason.value}")
    s = report.stats
    lines.append(f"{s['findings']} finding(s) in {len(s['documents'])} document(s); "
                 f"{s['blocks']} blocks, {s['sentences']} sentences, {s['rules_run']} rules run")
    return "\n".join(lines) + "\n"


def cmd_lint(args, out: TextIO) -> int:
    catalog = load_catalog(args.catalog)
    resources = Resources.load(args.doc_list, args.domain_terms)
    config = read_config(args.config) if args.config else DocConfig()
    paths = [Path(p) for p in args.documents]
    if args.workers > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            reports = list(pool.map(lambda p: _lint_one(p, catalog, resources, config), paths))
    else:
        reports = [_lint_one(p, catalog, resources, config) for p in paths]
    report = merge_reports(reports).filtered(args.min_accuracy)
    if args.format is OutputFormat.Json:
        out.write(report.to_json())
    else:
        out.write(format_report_human(report))
    return EXIT_FINDINGS if report.findings else EXIT_CLEAN


# --------------------------------------------------------------------------
# stats


def stats_dict(catalog: Catalog) -> dict:
    ingest = analytics.ingest_summary(catalog)
    return {
        "ingest": {
            "raw": ingest.raw_count,
            "unapproved": ingest.unapproved_filtered,
            "approved": ingest.approved_count,
            "split_added": ingest.split_added,
            "classified": ingest.classified_count,
        },
        "accuracy": analytics.accuracy_distribution(catalog).to_dict(),
        "combined": {
            "det+high": analytics.combined_share(catalog, [Accuracy.Deterministic, Accuracy.HeuristicHigh]),
            "det+high+medium": analytics.combined_share(
                catalog, [Accuracy.Deterministic, Accuracy.HeuristicHigh, Accuracy.HeuristicMedium]),
        },
        "type_accuracy": analytics.type_accuracy_crosstab(catalog).to_dict(),
        "required_info": analytics.info_frequency(catalog).to_dict(),
        "reasons": analytics.reasons_distribution(catalog).to_dict(),
    }


def format_stats_human(stats: dict) -> str:
    ing = stats["ingest"]
    lines = [
        f"ingest: raw {ing['raw']}, unapproved {ing['unapproved']}, approved {ing['approved']}, "
        f"split +{ing['split_added']}, classified {ing['classified']}",
        "",
        f"accuracy (n={stats['accuracy']['denominator']})",
    ]
    lines += [f"  {e['label']} {e['count']} {e['percent']}%" for e in stats["accuracy"]["entries"]]
    lines += [f"combined({k}) {v}%" for k, v in stats["combined"].items()]

    lines += ["", "type x accuracy"]
    cols = [a.value for a in Accuracy]
    lines.append("  " + " ".join(["type".ljust(12)] + [c.rjust(15) for c in cols]))
    for rtype, row in stats["type_accuracy"].items():
        lines.append("  " + " ".join([rtype.ljust(12)] + [str(row[c]).rjust(15) for c in cols]))

    info = stats["required_info"]
    lines += ["", f"required information (n={info['denominator']} detectable rules)"]
    lines += [f"  {e['label']} {e['count']} {e['percent']}%" for e in info["entries"]]

    reasons = stats["reasons"]
    lines += ["", f"reasons (n={reasons['denominator']} not detectable rules)"]
    for e in reasons["entries"]:
        lines.append(f"  {Reason(e['label']).short} {e['count']} {e['percent']}%  {e['label']}")
    return "\n".join(lines) + "\n"


def cmd_stats(args, out: TextIO) -> int:
    stats = stats_dict(load_catalog(args.catalog))
    if args.format is OutputFormat.Json:
        _dump_json(stats, out)
    else:
        out.write(format_stats_human(stats))
    return EXIT_CLEAN


# --------------------------------------------------------------------------
# agreement / validate


def cmd_agreement(args, out: TextIO) -> int:
    a = analytics.read_labels(args.file_a)
    b = analytics.read_labels(args.file_b)
    labels_a, labels_b = analytics.aligned_labels(a, b)
    result = analytics.weighted_kappa(labels_a, labels_b, args.scheme)
    if args.format is OutputFormat.Json:
        _dump_json(result.to_dict(), out)
    else:
        out.write(f"kappa {result.kappa:.9f}\n"
                  f"observed_agreement {result.observed_agreement:.9f}\n"
                  f"expected_agreement {result.expected_agreement:.9f}\n"
                  f"weight_scheme {result.weight_scheme.value}\n"
                  f"n {result.n}\n")
    return EXIT_CLEAN


def cmd_validate(args, out: TextIO) -> int:
    try:
        catalog = load_catalog(args.catalog)
    except ValidationError as exc:
        for v in exc.violations:
            out.write(f"{args.catalog}: {v}\n")
        return EXIT_FINDINGS
    out.write(f"{args.catalog}: {len(catalog)} rules OK\n")
    return EXIT_CLEAN


def cmd_serve(args, out: TextIO) -> int:
    import uvicorn

    uvicorn.run("reqlint.service.app:app", host=args.host, port=args.port)
    return EXIT_CLEAN


# --------------------------------------------------------------------------


def _accuracy(value: str) -> Accuracy:
    for a in Accuracy:
        if a.value.lower() == value.lower():
            return a
    raise argparse.ArgumentTypeError(
        f"invalid accuracy {value!r} (choose from {', '.join(a.value for a in Accuracy)})")


def _scheme(value: str) -> analytics.WeightScheme:
    try:
        return analytics.WeightScheme.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reqlint",
        description="Check requirements documents against a catalog of writing rules.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    fmt = dict(type=OutputFormat, choices=list(OutputFormat), default=OutputFormat.Human,
               help="output format (default: human)")

    p = sub.add_parser("lint", help="lint documents against a rule catalog")
    p.add_argument("documents", nargs="+", help="document files")
    p.add_argument("--catalog", required=True, help="rule catalog (JSON)")
    p.add_argument("--doc-list", help="TSV of document ids and titles")
    p.add_argument("--domain-terms", help="file with one domain term per line")
    p.add_argument("--config", help="document config file (key = value lines)")
    p.add_argument("--format", **fmt)
    p.add_argument("--min-accuracy", type=_accuracy,
                   help="drop findings less accurate than this class")
    p.add_argument("--workers", type=int, default=1, help="documents linted in parallel")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("stats", help="print catalog statistics")
    p.add_argument("--catalog", required=True)
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("agreement", help="weighted kappa between two raters' label files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--scheme", type=_scheme, default=analytics.WeightScheme.Linear,
                   help="Linear (default), Quadratic or Unweighted")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("validate", help="check a catalog against the rule invariants")
    p.add_argument("--catalog", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None,
         err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CLEAN if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=err)
    try:
        return args.func(args, out)
    except ValidationError as exc:
        err.write("reqlint: catalog violates rule invariants\n")
        for v in exc.violations:
            err.write(f"  {v}\n")
        return EXIT_ERROR
    except ReqlintError as exc:
        err.write(f"reqlint: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
