"""Lint orchestration: annotate, select blocks by rule context, run checkers."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .catalog import Accuracy, Catalog, Reason, Rule
from .checkers import Checker, Finding, Resources, registry_lookup
from .docmodel import Block, DocConfig, Document, blocks_in_context
from .errors import BadParams, CatalogMismatch, ResourceError, UnknownChecker
from .nlp import NlpResources, annotate_block, load_resources, split_sentences, tokenize

log = logging.getLogger(__name__)

LOW_CONFIDENCE = "low confidence"


@dataclass(frozen=True)
class Report:
    documents: tuple[str, ...]
    findings: tuple[Finding, ...] = ()
    skipped: tuple[tuple[str, Reason], ...] = ()
    per_rule_counts: dict[str, int] = field(default_factory=dict)
    blocks: int = 0
    sentences: int = 0
    rules_run: int = 0
    catalog_digest: str = ""

    @property
    def document(self) -> str:
        return ", ".join(self.documents)

    @property
    def stats(self) -> dict:
        return {
            "documents": list(self.documents),
            "blocks": self.blocks,
            "sentences": self.sentences,
            "rules_run": self.rules_run,
            "findings": len(self.findings),
            "per_rule_counts": dict(self.per_rule_counts),
        }

    def filtered(self, min_accuracy: Accuracy | None) -> Report:
        """Drop findings less accurate than *min_accuracy* (counts follow)."""
        if min_accuracy is None:
            return self
        kept = tuple(f for f in self.findings if f.accuracy.rank <= min_accuracy.rank)
        counts = {rid: 0 for rid in self.per_rule_counts}
        for f in kept:
            counts[f.rule_id] = counts.get(f.rule_id, 0) + 1
        return replace(self, findings=kept, per_rule_counts=counts)

    def to_dict(self) -> dict:
        return {
            "findings": [f.to_dict() for f in self.findings],
            "skipped": [{"rule_id": rid, "reason": reason.value} for rid, reason in self.skipped],
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class _Job:
    rule: Rule
    checker: Checker


def resolve_checkers(catalog: Catalog, resources: Resources) -> list[_Job]:
    """Bind every rule's checker, failing before any checker runs.

    All problems are collected first so the error names every rule that
    cannot be run.
    """
    jobs, unknown, missing, bad = [], [], [], []
    for rule in catalog.rules:
        if rule.checker is None or rule.accuracy is Accuracy.NotDetectable:
            continue
        try:
            checker = registry_lookup(rule.checker.checker_id)
        except UnknownChecker:
            unknown.append(f"rule {rule.id}: unknown checker {rule.checker.checker_id!r}")
            continue
        try:
            checker.validate_params(rule.checker.params)
        except BadParams as exc:
            bad.append(f"rule {rule.id}: {exc}")
            continue
        if checker.needs_document_list and not resources.document_list:
            missing.append(f"rule {rule.id}: checker {checker.id!r} needs a document list")
            continue
        jobs.append(_Job(rule, checker))
    if unknown:
        raise UnknownChecker("; ".join(unknown + missing + bad))
    if missing:
        raise ResourceError("; ".join(missing + bad))
    if bad:
        raise BadParams("; ".join(bad))
    return jobs


def _rebind(f: Finding, rule: Rule, doc: Document) -> Finding:
    message = f.message
    if rule.accuracy is Accuracy.HeuristicLow and LOW_CONFIDENCE not in message.lower().replace("-", " "):
        message += f" ({LOW_CONFIDENCE})"
    return replace(f, rule_id=rule.id, accuracy=rule.accuracy, message=message, document=doc.name)


def _check_block(block: Block, jobs: Sequence[_Job], doc: Document, config: DocConfig | None,
                 resources: Resources, nlp_resources: NlpResources) -> tuple[list[Finding], int]:
    """Run *jobs* on one block; returns its findings and sentence count.

    Annotations live only for the duration of the call, which keeps memory
    flat on long documents.
    """
    if not jobs:
        return [], len(split_sentences(tokenize(block.text, nlp_resources), nlp_resources))
    ann = annotate_block(block, config, nlp_resources)
    out = []
    for job in jobs:
        for f in job.checker(block, ann, job.rule.checker.params, resources):
            out.append(_rebind(f, job.rule, doc))
    return out, len(ann.sentences)


def lint(doc: Document, catalog: Catalog, resources: Resources | None = None, *,
         config: DocConfig | None = None, nlp_resources: NlpResources | None = None,
         workers: int = 1) -> Report:
    """Run every checker-bound rule of *catalog* over *doc*.

    Each rule only sees the blocks of its context. NotDetectable rules are
    listed in ``skipped`` with their reason. The result does not depend on
    *workers*: findings are sorted by (block, start, rule id).
    """
    resources = resources or Resources()
    nlp_resources = nlp_resources or load_resources()
    jobs = resolve_checkers(catalog, resources)

    per_block: list[list[_Job]] = [[] for _ in doc.blocks]
    for job in jobs:
        for block in blocks_in_context(doc, job.rule.context):
            per_block[block.index].append(job)

    def run(block: Block):
        return _check_block(block, per_block[block.index], doc, config, resources, nlp_resources)

    if workers > 1 and len(doc.blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, doc.blocks))
    else:
        results = [run(b) for b in doc.blocks]

    findings = sorted((f for batch, _ in results for f in batch), key=Finding.sort_key)
    counts = {job.rule.id: 0 for job in jobs}
    for f in findings:
        counts[f.rule_id] += 1
    skipped = tuple((r.id, r.reason) for r in catalog.rules
                    if r.accuracy is Accuracy.NotDetectable and r.reason is not None)
    log.debug("linted %s: %d findings from %d rules", doc.name, len(findings), len(jobs))
    return Report(
        documents=(doc.name,),
        findings=tuple(findings),
        skipped=skipped,
        per_rule_counts=counts,
        blocks=len(doc.blocks),
        sentences=sum(n for _, n in results),
        rules_run=len(jobs),
        catalog_digest=catalog.digest(),
    )


def merge_reports(reports: Sequence[Report] | Iterable[Report]) -> Report:
    """Combine per-document reports of the same catalog, keeping input order."""
    reports = list(reports)
    if not reports:
        raise ValueError("merge_reports needs at least one report")
    if len(reports) == 1:
        return reports[0]
    digest = reports[0].catalog_digest
    for r in reports[1:]:
        if r.catalog_digest != digest:
            raise CatalogMismatch(
                f"report for {r.document} was produced from a different catalog")
    documents = tuple(d for r in reports for d in r.documents)
    keyed = sorted((((i,) + f.sort_key(), f) for i, r in enumerate(reports) for f in r.findings),
                   key=lambda pair: pair[0])
    findings = [f for _, f in keyed]
    counts: dict[str, int] = {}
    for r in reports:
        for rid, n in r.per_rule_counts.items():
            counts[rid] = counts.get(rid, 0) + n
    return Report(
        documents=documents,
        findings=tuple(findings),
        skipped=reports[0].skipped,
        per_rule_counts=counts,
        blocks=sum(r.blocks for r in reports),
        sentences=sum(r.sentences for r in reports),
        rules_run=reports[0].rules_run,
        catalog_digest=digest,
    )
