"""Catalog statistics and inter-rater agreement."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .catalog import Accuracy, Catalog, ContextKind, InfoKind, IngestReport, Reason, Rule, RuleType, Scope
from .errors import DegenerateError, FormatError, LengthMismatch


class DenominatorKind(str, enum.Enum):
    AllRules = "AllRules"
    DetectableRules = "DetectableRules"
    NotDetectableRules = "NotDetectableRules"


class WeightScheme(str, enum.Enum):
    Linear = "Linear"
    Quadratic = "Quadratic"
    Unweighted = "Unweighted"

    @classmethod
    def parse(cls, value: str | WeightScheme) -> WeightScheme:
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise ValueError(f"unknown weight scheme {value!r}")


def percent(count: int, denominator: int) -> int:
    """Integer percentage rounded half up; 0 when the denominator is 0."""
    if denominator <= 0:
        return 0
    return (200 * count + denominator) // (2 * denominator)


@dataclass(frozen=True)
class DistEntry:
    label: str
    count: int
    percent: int


@dataclass(frozen=True)
class Distribution:
    entries: tuple[DistEntry, ...]
    denominator: int
    denominator_kind: DenominatorKind

    def __getitem__(self, label: str) -> DistEntry:
        label = getattr(label, "value", label)
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    def counts(self) -> list[int]:
        return [e.count for e in self.entries]

    def percents(self) -> list[int]:
        return [e.percent for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "denominator": self.denominator,
            "denominator_kind": self.denominator_kind.value,
            "entries": [{"label": e.label, "count": e.count, "percent": e.percent}
                        for e in self.entries],
        }


def _distribution(labels: Iterable[str], counts: dict[str, int], denominator: int,
                  kind: DenominatorKind) -> Distribution:
    return Distribution(
        tuple(DistEntry(l, counts.get(l, 0), percent(counts.get(l, 0), denominator)) for l in labels),
        denominator, kind,
    )


def _rules(catalog: Catalog | Iterable[Rule]) -> tuple[Rule, ...]:
    return catalog.rules if isinstance(catalog, Catalog) else tuple(catalog)


def _detectable(rules: Sequence[Rule]) -> list[Rule]:
    return [r for r in rules if r.accuracy is not Accuracy.NotDetectable]


def accuracy_distribution(catalog: Catalog | Iterable[Rule]) -> Distribution:
    rules = _rules(catalog)
    counts: dict[str, int] = {}
    for r in rules:
        counts[r.accuracy.value] = counts.get(r.accuracy.value, 0) + 1
    return _distribution((a.value for a in Accuracy), counts, len(rules), DenominatorKind.AllRules)


def combined_share(catalog: Catalog | Iterable[Rule], classes: Iterable[Accuracy | str]) -> int:
    """Rounded percentage of all rules whose accuracy is in *classes*."""
    rules = _rules(catalog)
    wanted = {Accuracy(c) for c in classes}
    return percent(sum(1 for r in rules if r.accuracy in wanted), len(rules))


@dataclass(frozen=True)
class CrossTab:
    cells: dict[tuple[RuleType, Accuracy], int] = field(default_factory=dict)

    def __getitem__(self, key: tuple[RuleType | str, Accuracy | str]) -> int:
        return self.cells.get((RuleType(key[0]), Accuracy(key[1])), 0)

    @property
    def total(self) -> int:
        return sum(self.cells.values())

    def row(self, rule_type: RuleType | str) -> list[int]:
        return [self[rule_type, a] for a in Accuracy]

    def to_dict(self) -> dict:
        return {t.value: {a.value: self[t, a] for a in Accuracy} for t in RuleType}


def type_accuracy_crosstab(catalog: Catalog | Iterable[Rule]) -> CrossTab:
    cells: dict[tuple[RuleType, Accuracy], int] = {}
    for r in _rules(catalog):
        key = (r.rule_type, r.accuracy)
        cells[key] = cells.get(key, 0) + 1
    return CrossTab(cells)


def info_frequency(catalog: Catalog | Iterable[Rule]) -> Distribution:
    """How many detectable rules need each kind of information.

    Rules may list several kinds, so counts can sum past the denominator.
    """
    detectable = _detectable(_rules(catalog))
    counts: dict[str, int] = {}
    for r in detectable:
        for kind in r.required_info:
            counts[kind.value] = counts.get(kind.value, 0) + 1
    return _distribution((k.value for k in InfoKind), counts, len(detectable),
                         DenominatorKind.DetectableRules)


def reasons_distribution(catalog: Catalog | Iterable[Rule]) -> Distribution:
    nd = [r for r in _rules(catalog) if r.accuracy is Accuracy.NotDetectable]
    if not nd:
        return Distribution((), 0, DenominatorKind.NotDetectableRules)
    counts: dict[str, int] = {}
    for r in nd:
        if r.reason is not None:
            counts[r.reason.value] = counts.get(r.reason.value, 0) + 1
    return _distribution((x.value for x in Reason), counts, len(nd),
                         DenominatorKind.NotDetectableRules)


def scope_distribution(catalog: Catalog | Iterable[Rule]) -> Distribution:
    detectable = _detectable(_rules(catalog))
    counts: dict[str, int] = {}
    for r in detectable:
        counts[r.scope.value] = counts.get(r.scope.value, 0) + 1
    return _distribution((s.value for s in Scope), counts, len(detectable),
                         DenominatorKind.DetectableRules)


def context_distribution(catalog: Catalog | Iterable[Rule]) -> Distribution:
    detectable = _detectable(_rules(catalog))
    counts: dict[str, int] = {}
    for r in detectable:
        counts[r.context.value] = counts.get(r.context.value, 0) + 1
    return _distribution((c.value for c in ContextKind), counts, len(detectable),
                         DenominatorKind.DetectableRules)


def ingest_summary(catalog: Catalog) -> IngestReport:
    return catalog.ingest


# --------------------------------------------------------------------------
# agreement


@dataclass(frozen=True)
class AgreementResult:
    kappa: float
    observed_agreement: float
    expected_agreement: float
    weight_scheme: WeightScheme
    n: int = 0

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "observed_agreement": self.observed_agreement,
            "expected_agreement": self.expected_agreement,
            "weight_scheme": self.weight_scheme.value,
            "n": self.n,
        }


def agreement_weights(scheme: WeightScheme | str, k: int = len(Accuracy)) -> list[list[float]]:
    scheme = WeightScheme.parse(scheme)
    span = k - 1
    if scheme is WeightScheme.Linear:
        return [[1 - abs(i - j) / span for j in range(k)] for i in range(k)]
    if scheme is WeightScheme.Quadratic:
        return [[1 - (i - j) ** 2 / span ** 2 for j in range(k)] for i in range(k)]
    return [[1.0 if i == j else 0.0 for j in range(k)] for i in range(k)]


def weighted_kappa(labels_a: Sequence[Accuracy | str], labels_b: Sequence[Accuracy | str],
                   scheme: WeightScheme | str = WeightScheme.Linear) -> AgreementResult:
    """Weighted Cohen's kappa over the ordinal accuracy scale.

    ``kappa = (po - pe) / (1 - pe)`` with agreement weights applied to both
    the observed and the chance-expected joint distribution. When the
    expected agreement is already 1 (both raters used one and the same
    class) and the raters agree, kappa is 1 by convention.
    """
    if len(labels_a) != len(labels_b) or not labels_a:
        raise LengthMismatch(f"label sequences must be non-empty and equal in length "
                             f"(got {len(labels_a)} and {len(labels_b)})")
    scheme = WeightScheme.parse(scheme)
    k = len(Accuracy)
    w = agreement_weights(scheme, k)
    a = [Accuracy(x).rank for x in labels_a]
    b = [Accuracy(x).rank for x in labels_b]
    n = len(a)

    table = [[0] * k for _ in range(k)]
    for i, j in zip(a, b):
        table[i][j] += 1
    rows = [sum(table[i]) / n for i in range(k)]
    cols = [sum(table[i][j] for i in range(k)) / n for j in range(k)]
    po = sum(w[i][j] * table[i][j] for i in range(k) for j in range(k)) / n
    pe = sum(w[i][j] * rows[i] * cols[j] for i in range(k) for j in range(k))

    if abs(1 - pe) < 1e-12:
        if abs(1 - po) < 1e-12:
            return AgreementResult(1.0, po, pe, scheme, n)
        raise DegenerateError("expected agreement is 1; kappa is undefined")
    return AgreementResult((po - pe) / (1 - pe), po, pe, scheme, n)


def read_labels(path: str | Path) -> dict[str, Accuracy]:
    """Read a rater file: one ``rule-id  AccuracyLabel`` pair per line."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read label file: {exc.strerror}", path) from None
    labels: dict[str, Accuracy] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError("expected '<rule-id> <accuracy>'", path, lineno)
        rid, label = parts
        try:
            acc = Accuracy(label)
        except ValueError:
            raise FormatError(f"unknown accuracy label {label!r}", path, lineno) from None
        if rid in labels:
            raise FormatError(f"duplicate rule id {rid!r}", path, lineno)
        labels[rid] = acc
    return labels


def aligned_labels(a: dict[str, Accuracy], b: dict[str, Accuracy]) -> tuple[list[Accuracy], list[Accuracy]]:
    """Pair two raters' labels by rule id; both must cover the same ids."""
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))
        only_b = sorted(set(b) - set(a))
        raise LengthMismatch(f"rule ids differ (only in first: {only_a[:5]}, only in second: {only_b[:5]})")
    ids = list(a)
    return [a[i] for i in ids], [b[i] for i in ids]
