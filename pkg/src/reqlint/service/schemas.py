"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field

from ..analytics import WeightScheme
from ..catalog import Accuracy


class DocumentIn(BaseModel):
    name: str = "<string>"
    text: str


class DocConfigIn(BaseModel):
    requirement_id_pattern: Optional[str] = None
    heading_marker: Optional[str] = None
    references_heading_title: Optional[str] = None
    comment_marker: Optional[str] = None


class LintRequest(BaseModel):
    documents: list[DocumentIn] = Field(min_length=1)
    catalog: dict[str, Any] = Field(description='catalog JSON object with a "rules" list')
    document_list: dict[str, str] = {}
    domain_terms: list[str] = []
    config: Optional[DocConfigIn] = None
    min_accuracy: Optional[Accuracy] = None


class FindingOut(BaseModel):
    document: str
    rule_id: str
    block: int
    start: int
    end: int
    accuracy: Accuracy
    message: str
    suggestion: Optional[str] = None


class SkippedOut(BaseModel):
    rule_id: str
    reason: str


class LintStats(BaseModel):
    documents: list[str]
    blocks: int
    sentences: int
    rules_run: int
    findings: int
    per_rule_counts: dict[str, int]


class LintResponse(BaseModel):
    findings: list[FindingOut]
    skipped: list[SkippedOut]
    stats: LintStats


class CatalogRequest(BaseModel):
    catalog: dict[str, Any]


class IngestOut(BaseModel):
    raw: int
    unapproved: int
    approved: int
    split_added: int
    classified: int


class DistEntryOut(BaseModel):
    label: str
    count: int
    percent: int


class DistributionOut(BaseModel):
    denominator: int
    denominator_kind: str
    entries: list[DistEntryOut]


class StatsResponse(BaseModel):
    ingest: IngestOut
    accuracy: DistributionOut
    combined: dict[str, int]
    type_accuracy: dict[str, dict[str, int]]
    required_info: DistributionOut
    reasons: DistributionOut


class AgreementRequest(BaseModel):
    labels_a: dict[str, Accuracy]
    labels_b: dict[str, Accuracy]
    scheme: WeightScheme = WeightScheme.Linear


class AgreementResponse(BaseModel):
    kappa: float
    observed_agreement: float
    expected_agreement: float
    weight_scheme: WeightScheme
    n: int


class ValidateResponse(BaseModel):
    valid: bool
    rules: int
    violations: list[str]


class ErrorResponse(BaseModel):
    error: str
    detail: str
