"""The classified rule catalog: data model, JSON ingest, validation, queries.

Catalog file layout::

    {"rules": [
        {"id": "160", "status": "Approved", "text": "...",
         "type": "Lexical", "context": "Anywhere", "scope": "WordPhrase",
         "required_info": ["LemmasDictionaries"], "accuracy": "Deterministic",
         "checker": {"id": "forbidden_term", "params": {"functionality": "function"}}},
        {"id": "12", "status": "Approved", "text": "...",
         "subrules": [{"id": "12.1", ...}, {"id": "12.2", ...}]},
        ...
    ]}

A top-level entry with ``subrules`` is a compound rule: it is replaced by its
sub-rules (each carrying ``parent_id``) when approved.
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

from .errors import FormatError, ValidationError


class RuleType(str, enum.Enum):
    Lexical = "Lexical"
    Grammatical = "Grammatical"
    Structural = "Structural"
    Semantic = "Semantic"
    Unclassified = "Unclassified"


class ContextKind(str, enum.Enum):
    Anywhere = "Anywhere"
    Requirement = "Requirement"
    Heading = "Heading"
    Figure = "Figure"
    Table = "Table"
    Reference = "Reference"
    Enumeration = "Enumeration"
    Comment = "Comment"
    Unclassified = "Unclassified"


class Scope(str, enum.Enum):
    WordPhrase = "WordPhrase"
    Sentence = "Sentence"
    Section = "Section"
    Document = "Document"
    Global = "Global"
    Unclassified = "Unclassified"


class InfoKind(str, enum.Enum):
    LemmasDictionaries = "LemmasDictionaries"
    PureTextRegex = "PureTextRegex"
    Formatting = "Formatting"
    DomainModels = "DomainModels"
    PosTags = "PosTags"
    ListsOfX = "ListsOfX"
    Morphology = "Morphology"
    ParseTrees = "ParseTrees"
    WordStems = "WordStems"
    TokensSentences = "TokensSentences"
    NamedEntities = "NamedEntities"


class Accuracy(str, enum.Enum):
    """Detection accuracy, best first. Member order is the ordinal scale."""

    Deterministic = "Deterministic"
    HeuristicHigh = "HeuristicHigh"
    HeuristicMedium = "HeuristicMedium"
    HeuristicLow = "HeuristicLow"
    NotDetectable = "NotDetectable"

    @property
    def rank(self) -> int:
        return _ACCURACY_ORDER.index(self)


_ACCURACY_ORDER = list(Accuracy)


class Reason(str, enum.Enum):
    R1_UnclearRule = "R1_UnclearRule"
    R2_DeepSemantics = "R2_DeepSemantics"
    R3_DomainKnowledge = "R3_DomainKnowledge"
    R4_SystemScope = "R4_SystemScope"
    R5_ProcessStatus = "R5_ProcessStatus"

    @property
    def short(self) -> str:
        return self.value.split("_", 1)[0]


class Status(str, enum.Enum):
    Approved = "Approved"
    Unapproved = "Unapproved"


@dataclass(frozen=True)
class CheckerBinding:
    checker_id: str
    params: dict[str, Any] = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash((self.checker_id, json.dumps(self.params, sort_keys=True)))


@dataclass(frozen=True)
class Rule:
    id: str
    text: str
    rule_type: RuleType
    context: ContextKind
    scope: Scope
    accuracy: Accuracy
    required_info: frozenset[InfoKind] = frozenset()
    reason: Reason | None = None
    checker: CheckerBinding | None = None
    status: Status = Status.Approved
    parent_id: str | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"id": self.id}
        if self.parent_id is not None:
            d["parent_id"] = self.parent_id
        d.update(
            status=self.status.value,
            text=self.text,
            type=self.rule_type.value,
            context=self.context.value,
            scope=self.scope.value,
            required_info=[k.value for k in InfoKind if k in self.required_info],
            accuracy=self.accuracy.value,
        )
        if self.reason is not None:
            d["reason"] = self.reason.value
        if self.checker is not None:
            d["checker"] = {"id": self.checker.checker_id, "params": self.checker.params}
        return d


@dataclass(frozen=True)
class IngestReport:
    raw_count: int = 0
    unapproved_filtered: int = 0
    approved_count: int = 0
    split_added: int = 0
    classified_count: int = 0

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.raw_count, self.unapproved_filtered, self.approved_count,
                self.split_added, self.classified_count)

    def consistent(self) -> bool:
        return (self.classified_count == self.approved_count + self.split_added
                and self.approved_count == self.raw_count - self.unapproved_filtered)


@dataclass(frozen=True)
class Catalog:
    rules: tuple[Rule, ...] = ()
    ingest: IngestReport = IngestReport()

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def get(self, rule_id: str) -> Rule | None:
        return next((r for r in self.rules if r.id == rule_id), None)

    def digest(self) -> str:
        """Stable content hash, used to refuse merging unrelated reports."""
        payload = json.dumps([r.to_dict() for r in self.rules], sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> Catalog:
        rules = tuple(rules)
        n = len(rules)
        return cls(rules, IngestReport(n, 0, n, 0, n))


# --------------------------------------------------------------------------
# validation


def validate_rule(rule: Rule) -> list[str]:
    """Return one message per violated rule invariant (empty when valid)."""
    out = []
    nd = rule.accuracy is Accuracy.NotDetectable
    if nd:
        if rule.reason is None:
            out.append(f"rule {rule.id}: NotDetectable rule has no reason")
        if rule.checker is not None:
            out.append(f"rule {rule.id}: NotDetectable rule must not bind a checker")
        if rule.required_info:
            out.append(f"rule {rule.id}: NotDetectable rule must not list required_info")
    else:
        if rule.reason is not None:
            out.append(f"rule {rule.id}: reason is only allowed on NotDetectable rules")
        if not rule.required_info:
            out.append(f"rule {rule.id}: detectable rule needs at least one required_info entry")
        unclassified = [name for name, value in (
            ("type", rule.rule_type), ("context", rule.context), ("scope", rule.scope))
            if value.value == "Unclassified"]
        if unclassified:
            out.append(f"rule {rule.id}: Unclassified {', '.join(unclassified)} "
                       "only allowed on NotDetectable rules")
    if not rule.id:
        out.append("rule with empty id")
    return out


def validate_catalog(rules: Iterable[Rule]) -> list[str]:
    out = []
    seen: set[str] = set()
    for rule in rules:
        out.extend(validate_rule(rule))
        if rule.id in seen:
            out.append(f"rule {rule.id}: duplicate id")
        seen.add(rule.id)
    return out


# --------------------------------------------------------------------------
# ingest

class _Locator:
    """Maps rule ids to line numbers of their ``"id"`` key in the source text."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def line_of(self, rule_id: Any) -> int | None:
        pat = re.compile(r'"id"\s*:\s*' + re.escape(json.dumps(rule_id)))
        m = pat.search(self.text, self.pos) or pat.search(self.text)
        if m is None:
            return None
        self.pos = m.end()
        return self.text.count("\n", 0, m.start()) + 1


def _enum(cls, value, what: str, rid, path, line):
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in cls)
        raise FormatError(f"rule {rid}: invalid {what} {value!r} (expected one of {allowed})",
                          path, line) from None


def _parse_rule(obj: Any, path, locator: _Locator, parent: dict | None = None) -> Rule:
    if not isinstance(obj, dict):
        raise FormatError("rule entries must be JSON objects", path)
    rid = obj.get("id")
    line = locator.line_of(rid) if rid is not None else None
    if not isinstance(rid, str) or not rid:
        raise FormatError("rule without a non-empty string id", path, line)
    for key in ("text", "type", "context", "scope", "accuracy"):
        if key not in obj:
            raise FormatError(f"rule {rid}: missing field {key!r}", path, line)
    if not isinstance(obj["text"], str):
        raise FormatError(f"rule {rid}: text must be a string", path, line)
    info = obj.get("required_info", [])
    if not isinstance(info, list):
        raise FormatError(f"rule {rid}: required_info must be a list", path, line)
    reason = obj.get("reason")
    checker = obj.get("checker")
    binding = None
    if checker is not None:
        if not isinstance(checker, dict) or not isinstance(checker.get("id"), str):
            raise FormatError(f"rule {rid}: checker must be an object with a string id", path, line)
        params = checker.get("params", {})
        if not isinstance(params, dict):
            raise FormatError(f"rule {rid}: checker params must be an object", path, line)
        binding = CheckerBinding(checker["id"], params)
    status = obj.get("status", parent.get("status") if parent else None)
    return Rule(
        id=rid,
        parent_id=parent["id"] if parent else obj.get("parent_id"),
        status=_enum(Status, status, "status", rid, path, line),
        text=obj["text"],
        rule_type=_enum(RuleType, obj["type"], "type", rid, path, line),
        context=_enum(ContextKind, obj["context"], "context", rid, path, line),
        scope=_enum(Scope, obj["scope"], "scope", rid, path, line),
        required_info=frozenset(_enum(InfoKind, k, "required_info", rid, path, line) for k in info),
        accuracy=_enum(Accuracy, obj["accuracy"], "accuracy", rid, path, line),
        reason=None if reason is None else _enum(Reason, reason, "reason", rid, path, line),
        checker=binding,
    )


def parse_catalog(text: str, path=None) -> Catalog:
    """Parse catalog JSON text; see :func:`load_catalog`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, path, exc.lineno) from None
    if not isinstance(data, dict) or not isinstance(data.get("rules"), list):
        raise FormatError('top level must be an object with a "rules" list', path, 1)

    locator = _Locator(text)
    raw = unapproved = split_added = 0
    rules: list[Rule] = []
    for entry in data["rules"]:
        raw += 1
        if not isinstance(entry, dict):
            raise FormatError("rule entries must be JSON objects", path)
        status = entry.get("status")
        if status == Status.Unapproved.value:
            unapproved += 1
            locator.line_of(entry.get("id"))
            for sub in entry.get("subrules") or ():
                if isinstance(sub, dict):
                    locator.line_of(sub.get("id"))
            continue
        if status != Status.Approved.value:
            raise FormatError(f"rule {entry.get('id')}: invalid status {status!r}",
                              path, locator.line_of(entry.get("id")))
        subrules = entry.get("subrules")
        if subrules:
            if not isinstance(subrules, list):
                raise FormatError(f"rule {entry.get('id')}: subrules must be a list", path)
            locator.line_of(entry.get("id"))
            rules.extend(_parse_rule(sub, path, locator, parent=entry) for sub in subrules)
            split_added += len(subrules) - 1
        else:
            rules.append(_parse_rule(entry, path, locator))

    approved = raw - unapproved
    report = IngestReport(raw, unapproved, approved, split_added, approved + split_added)
    violations = validate_catalog(rules)
    if violations:
        raise ValidationError(violations)
    return Catalog(tuple(rules), report)


def load_catalog(path: str | Path) -> Catalog:
    """Load, split and validate a catalog file.

    Unapproved entries are dropped, compound entries are expanded into their
    sub-rules. Raises FormatError (with a line number where one is known) on
    malformed input and ValidationError listing every invariant violation.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read catalog: {exc.strerror}", path) from None
    return parse_catalog(text, path)


def dump_catalog(rules: Iterable[Rule]) -> str:
    return json.dumps({"rules": [r.to_dict() for r in rules]}, indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# queries

_FIELD_ALIASES = {"type": "rule_type"}


def query(catalog: Catalog | Iterable[Rule],
          predicate: Callable[[Rule], bool] | None = None, **fields) -> list[Rule]:
    """Order-preserving filter over rules.

    Keyword filters compare classification fields by equality, e.g.
    ``query(cat, accuracy=Accuracy.NotDetectable)``. ``required_info``
    matches rules that list the given kind.
    """
    rules = catalog.rules if isinstance(catalog, Catalog) else tuple(catalog)
    wanted = {_FIELD_ALIASES.get(k, k): v for k, v in fields.items()}

    def keep(rule: Rule) -> bool:
        for name, value in wanted.items():
            actual = getattr(rule, name)
            if name == "required_info":
                if InfoKind(value) not in actual:
                    return False
            elif actual is None or value is None:
                if actual is not value:
                    return False
            elif getattr(actual, "value", actual) != getattr(value, "value", value):
                return False
        return predicate is None or predicate(rule)

    return [r for r in rules if keep(r)]
