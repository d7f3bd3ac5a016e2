"""Rule checkers.

Every checker has the signature ``check(block, annotations, params,
resources) -> list[Finding]``, is pure, and reports spans relative to the
block text. The engine overwrites ``rule_id`` and ``accuracy`` with the
values of the catalog rule the checker is bound to.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Mapping

from .catalog import Accuracy
from .docmodel import Block, BlockKind, Span
from .errors import BadParams, ResourceError, UnknownChecker
from .nlp import (AnnotationSet, ChunkLabel, PosTag, Sentence, lemmatize,
                  load_resources, match_np, read_tsv, tokenize)


@dataclass(frozen=True, order=True)
class Finding:
    block: int
    span: Span
    rule_id: str
    message: str = field(compare=False)
    accuracy: Accuracy = field(default=Accuracy.Deterministic, compare=False)
    suggestion: str | None = field(default=None, compare=False)
    document: str | None = field(default=None, compare=False)

    def sort_key(self) -> tuple:
        return (self.block, self.span.start, self.rule_id, self.span.end, self.message)

    def to_dict(self) -> dict:
        return {
            "document": self.document,
            "rule_id": self.rule_id,
            "block": self.block,
            "start": self.span.start,
            "end": self.span.end,
            "accuracy": self.accuracy.value,
            "message": self.message,
            "suggestion": self.suggestion,
        }


@dataclass(frozen=True)
class Resources:
    """Domain knowledge the checkers may consult."""

    document_list: Mapping[str, str] = field(default_factory=dict)
    gazetteer: Mapping[str, str] = field(default_factory=dict)
    domain_terms: frozenset[str] = frozenset()

    def __post_init__(self):
        for doc_id, title in self.document_list.items():
            if not doc_id.strip() or not title.strip():
                raise ResourceError(f"document list entry {doc_id!r} needs a non-empty id and title")

    @classmethod
    def load(cls, doc_list: str | Path | None = None,
             domain_terms: str | Path | None = None) -> Resources:
        documents = {}
        if doc_list is not None:
            for doc_id, title, *_ in read_tsv(Path(doc_list)):
                documents[doc_id.strip()] = title.strip()
        terms: frozenset[str] = frozenset()
        if domain_terms is not None:
            terms = frozenset(r[0].strip().lower() for r in read_tsv(Path(domain_terms), 1))
        return cls(document_list=documents, gazetteer=dict(load_resources().gazetteer),
                   domain_terms=terms)


CheckFn = Callable[[Block, AnnotationSet, Mapping[str, Any], Resources], list[Finding]]


@dataclass(frozen=True)
class Checker:
    id: str
    fn: CheckFn
    accuracy: Accuracy
    block_kinds: frozenset[BlockKind] | None = None  # None: any block
    needs_document_list: bool = False

    def __call__(self, block, annotations, params=None, resources=None) -> list[Finding]:
        return self.fn(block, annotations, params or {}, resources or Resources())

    def validate_params(self, params: Mapping[str, Any]) -> None:
        _PARAM_VALIDATORS.get(self.id, lambda p: None)(params)


def _finding(block: Block, start: int, end: int, message: str, accuracy: Accuracy,
             suggestion: str | None = None) -> Finding:
    return Finding(block=block.index, span=Span(start, end), rule_id="",
                   message=message, accuracy=accuracy, suggestion=suggestion)


def _is_word(text: str) -> bool:
    return text[:1].isalnum() or any(c.isalnum() for c in text)


def _body_sentences(ann: AnnotationSet) -> list[tuple[Sentence, int]]:
    """Sentences paired with the index of their first token after the ID prefix."""
    out = []
    for sent in ann.sentences:
        body = max(sent.start, min(ann.prefix_end, sent.end))
        if any(_is_word(t.text) for t in ann.tokens[body:sent.end]):
            out.append((sent, body))
    return out


def _body_span(ann: AnnotationSet, sent: Sentence, body: int) -> tuple[int, int]:
    return ann.tokens[body].span.start, sent.span.end


# --------------------------------------------------------------------------
# forbidden terms


def _forbidden_terms(params: Mapping[str, Any]) -> list[tuple[str, str | None]]:
    if isinstance(params.get("terms"), list):
        pairs = []
        for item in params["terms"]:
            if isinstance(item, str):
                pairs.append((item, None))
            elif isinstance(item, Mapping) and isinstance(item.get("term"), str):
                pairs.append((item["term"], item.get("replacement")))
            else:
                raise BadParams(f"forbidden_term: bad terms entry {item!r}")
    else:
        pairs = [(k, v if isinstance(v, str) and v else None) for k, v in params.items()]
    pairs = [(t, r) for t, r in pairs if t.strip()]
    if not pairs:
        raise BadParams("forbidden_term needs at least one term")
    return pairs


def _validate_forbidden(params):
    _forbidden_terms(params)


@lru_cache(maxsize=256)
def _term_lemmas(term: str) -> tuple[str, ...]:
    return tuple(lemmatize(t.text) for t in tokenize(term) if _is_word(t.text))


def check_forbidden_term(block: Block, ann: AnnotationSet, params: Mapping[str, Any],
                         resources: Resources | None = None) -> list[Finding]:
    """One finding per occurrence of a forbidden lemma or lemma sequence.

    Params map each forbidden term to its replacement, or carry a ``terms``
    list of strings / ``{"term", "replacement"}`` objects. Matching is by
    lemma, so inflected forms are caught; overlapping phrase matches are
    resolved leftmost-longest.
    """
    terms = sorted(((_term_lemmas(t), t, r) for t, r in _forbidden_terms(params)),
                   key=lambda x: -len(x[0]))
    words = [t for t in ann.tokens if _is_word(t.text)]
    lemmas = [t.lemma or lemmatize(t.text) for t in words]
    out = []
    i = 0
    while i < len(words):
        for key, term, replacement in terms:
            if key and tuple(lemmas[i:i + len(key)]) == key:
                first, last = words[i], words[i + len(key) - 1]
                msg = f'forbidden term "{block.text[first.span.start:last.span.end]}"'
                if replacement:
                    msg += f'; use "{replacement}" instead'
                out.append(_finding(block, first.span.start, last.span.end, msg,
                                    Accuracy.Deterministic, replacement))
                i += len(key)
                break
        else:
            i += 1
    return out


# --------------------------------------------------------------------------
# regular expressions


def _truthy(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


_FLAG_LETTERS = {"i": re.IGNORECASE, "m": re.MULTILINE, "s": re.DOTALL, "x": re.VERBOSE}


def _compile_regex(params: Mapping[str, Any]) -> re.Pattern:
    pattern = params.get("pattern")
    if not isinstance(pattern, str) or not pattern:
        raise BadParams("regex checker needs a non-empty 'pattern'")
    flags = 0
    for letter in str(params.get("flags", "")):
        if letter not in _FLAG_LETTERS:
            raise BadParams(f"regex checker: unknown flag {letter!r}")
        flags |= _FLAG_LETTERS[letter]
    try:
        return re.compile(pattern, flags)
    except re.error as exc:
        raise BadParams(f"regex checker: bad pattern {pattern!r}: {exc}") from None


def check_regex(block: Block, ann: AnnotationSet | None, params: Mapping[str, Any],
                resources: Resources | None = None) -> list[Finding]:
    """Flag every non-empty, non-overlapping match of ``pattern``.

    With ``invert`` set, a single block-wide finding is emitted when the
    pattern does *not* match a non-blank block.
    """
    rx = _compile_regex(params)
    message = params.get("message") or f"text matches /{rx.pattern}/"
    if _truthy(params.get("invert", False)):
        if not block.text.strip() or rx.search(block.text):
            return []
        return [_finding(block, 0, len(block.text), params.get("message")
                         or f"text does not match /{rx.pattern}/", Accuracy.Deterministic)]
    return [_finding(block, m.start(), m.end(), message, Accuracy.Deterministic)
            for m in rx.finditer(block.text) if m.end() > m.start()]


# --------------------------------------------------------------------------
# references by document title


@lru_cache(maxsize=32)
def _doc_id_regex(ids: tuple[str, ...]) -> re.Pattern:
    alts = "|".join(re.escape(i) for i in sorted(ids, key=len, reverse=True))
    return re.compile(rf"(?<![\w-])(?:{alts})(?![\w]|-\w)")


def _sentence_bounds(ann: AnnotationSet | None, pos: int, length: int) -> tuple[int, int]:
    if ann is not None:
        for sent in ann.sentences:
            if sent.span.start <= pos < sent.span.end:
                return sent.span.start, sent.span.end
    return 0, length


def check_reference_style(block: Block, ann: AnnotationSet | None,
                          params: Mapping[str, Any] | None,
                          resources: Resources | None) -> list[Finding]:
    """Flag document ids cited without the document title in the same sentence."""
    documents = resources.document_list if resources else {}
    if not documents:
        raise ResourceError("reference_style needs a non-empty document list")
    rx = _doc_id_regex(tuple(documents))
    lowered = block.text.lower()
    out = []
    for m in rx.finditer(block.text):
        title = documents[m.group(0)]
        start, end = _sentence_bounds(ann, m.start(), len(block.text))
        if title.lower() not in lowered[start:end]:
            out.append(_finding(block, m.start(), m.end(),
                                f'reference to {m.group(0)} should cite the title "{title}"',
                                Accuracy.Deterministic, f"{m.group(0)}, {title}"))
    return out


# --------------------------------------------------------------------------
# definitions must carry the "Definition:" marker

_DEFINITION_PREFIX = re.compile(r"\s*Definition\s*:", re.IGNORECASE)


def _definition_marker_at(words: list[str], k: int) -> int | None:
    """Index just past a definitional copula starting at *k*, else None."""
    w = words[k]
    nxt = words[k + 1] if k + 1 < len(words) else ""
    if w in ("is", "are") and nxt in ("a", "an"):
        return k + 1  # the article opens the defining noun phrase
    if w in ("means", "mean", "denotes", "denote"):
        return k + 1
    if w in ("refers", "refer") and nxt == "to":
        return k + 2
    return None


def check_definition_marker(block: Block, ann: AnnotationSet,
                            params: Mapping[str, Any] | None = None,
                            resources: Resources | None = None) -> list[Finding]:
    """Flag definitional sentences (NP is-a/means/denotes/refers-to NP) lacking the marker."""
    if block.kind not in (BlockKind.Requirement, BlockKind.Informative):
        return []
    body_start = ann.tokens[ann.prefix_end].span.start if ann.prefix_end < len(ann.tokens) else 0
    if _DEFINITION_PREFIX.match(block.text, body_start):
        return []
    tags = [t.pos for t in ann.tokens]
    words = [t.lower for t in ann.tokens]
    np_ends = {c.end for c in ann.chunks if c.label is ChunkLabel.NP}
    out = []
    for sent, body in _body_sentences(ann):
        for k in range(body + 1, sent.end):
            after = _definition_marker_at(words, k)
            if after is None or k not in np_ends or after >= sent.end:
                continue
            np_end = match_np(tags[:sent.end], after)
            if np_end is None:
                continue
            start, end = _body_span(ann, sent, body)
            out.append(_finding(
                block, start, end,
                'definition should be introduced with "Definition:"',
                Accuracy.HeuristicMedium, "Definition: " + block.text[start:end]))
            break
    return out


# --------------------------------------------------------------------------
# requirements start with their subject / name it explicitly

_PRONOUN_SUBJECTS = frozenset({"it", "this", "that", "they"})


def _leading_chunk(ann: AnnotationSet, sent: Sentence, body: int):
    for c in ann.sentence_chunks(sent):
        if c.end <= body:
            continue
        if c.label is ChunkLabel.O and all(t.pos is PosTag.PUNCT for t in ann.tokens[c.start:c.end]):
            continue
        return c
    return None


def check_subject_first(block: Block, ann: AnnotationSet,
                        params: Mapping[str, Any] | None = None,
                        resources: Resources | None = None) -> list[Finding]:
    if block.kind is not BlockKind.Requirement:
        return []
    out = []
    for sent, body in _body_sentences(ann):
        first = _leading_chunk(ann, sent, body)
        if first is None or (first.label is ChunkLabel.NP and first.is_subject):
            continue
        opener = {
            ChunkLabel.SBAR: "a subordinate clause",
            ChunkLabel.VP: "a verb",
            ChunkLabel.PP: "a prepositional phrase",
            ChunkLabel.NP: "a phrase that is not the subject",
        }.get(first.label, f'"{ann.tokens[first.start].text}"')
        start, end = _body_span(ann, sent, body)
        out.append(_finding(block, start, end,
                            f"requirement should start with its subject, not {opener}",
                            Accuracy.HeuristicHigh))
    return out


def check_explicit_subject(block: Block, ann: AnnotationSet,
                           params: Mapping[str, Any] | None = None,
                           resources: Resources | None = None) -> list[Finding]:
    if block.kind is not BlockKind.Requirement:
        return []
    out = []
    for sent, body in _body_sentences(ann):
        subject = next((c for c in ann.sentence_chunks(sent) if c.is_subject), None)
        start, end = _body_span(ann, sent, body)
        if subject is None:
            out.append(_finding(block, start, end, "requirement has no explicit subject",
                                Accuracy.HeuristicHigh))
        elif subject.end - subject.start == 1 and ann.tokens[subject.start].lower in _PRONOUN_SUBJECTS:
            tok = ann.tokens[subject.start]
            out.append(_finding(block, tok.span.start, tok.span.end,
                                f'subject "{tok.text}" is a pronoun; name the subject explicitly',
                                Accuracy.HeuristicHigh))
    return out


# --------------------------------------------------------------------------
# clarifications belong in separate requirements

_CLARIFICATION_MARKERS = (
    ("i.e.",), ("e.g.",), ("in", "other", "words"), ("this", "means"), ("to", "clarify"),
)
_PARENTHETICAL_MIN = 6


def check_clarification_split(block: Block, ann: AnnotationSet,
                              params: Mapping[str, Any] | None = None,
                              resources: Resources | None = None) -> list[Finding]:
    """Low-confidence hint that a requirement embeds a clarification.

    Triggers on explicit clarification markers, or on a parenthetical of
    more than five tokens placed after the modal verb.
    """
    if block.kind is not BlockKind.Requirement:
        return []
    out = []
    for sent, body in _body_sentences(ann):
        toks = ann.tokens[body:sent.end]
        words = [t.lower for t in toks]
        hit = None
        for k in range(len(words)):
            for marker in _CLARIFICATION_MARKERS:
                if tuple(words[k:k + len(marker)]) == marker:
                    hit = (toks[k].span.start, toks[k + len(marker) - 1].span.end)
                    break
            if hit:
                break
        if hit is None:
            modal = next((k for k, t in enumerate(toks) if t.pos is PosTag.AUX
                          and t.lower in ("shall", "must", "should", "will", "may", "can")), None)
            if modal is not None:
                for k in range(modal + 1, len(toks)):
                    if toks[k].text != "(":
                        continue
                    close = next((j for j in range(k + 1, len(toks)) if toks[j].text == ")"), len(toks))
                    if close - k - 1 >= _PARENTHETICAL_MIN:
                        hit = (toks[k].span.start, toks[min(close, len(toks) - 1)].span.end)
                        break
        if hit:
            out.append(_finding(
                block, hit[0], hit[1],
                "low-confidence candidate: clarifying information may belong in a separate requirement",
                Accuracy.HeuristicLow))
    return out


# --------------------------------------------------------------------------
# registry

_PARAM_VALIDATORS: dict[str, Callable[[Mapping[str, Any]], None]] = {
    "forbidden_term": _validate_forbidden,
    "regex": _compile_regex,
}

_REQ = frozenset({BlockKind.Requirement})

REGISTRY: dict[str, Checker] = {c.id: c for c in (
    Checker("forbidden_term", check_forbidden_term, Accuracy.Deterministic),
    Checker("regex", check_regex, Accuracy.Deterministic),
    Checker("reference_style", check_reference_style, Accuracy.Deterministic,
            needs_document_list=True),
    Checker("definition_marker", check_definition_marker, Accuracy.HeuristicMedium,
            frozenset({BlockKind.Requirement, BlockKind.Informative})),
    Checker("subject_first", check_subject_first, Accuracy.HeuristicHigh, _REQ),
    Checker("explicit_subject", check_explicit_subject, Accuracy.HeuristicHigh, _REQ),
    Checker("clarification_split", check_clarification_split, Accuracy.HeuristicLow, _REQ),
)}


def registry_lookup(checker_id: str) -> Checker:
    try:
        return REGISTRY[checker_id]
    except KeyError:
        raise UnknownChecker(f"unknown checker {checker_id!r}") from None
