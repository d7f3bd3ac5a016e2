"""Shallow, resource-driven annotation of block text.

Every layer here is deterministic and rule based: tokens and sentences,
dictionary lemmas, suffix-stripping stems, a lexicon/suffix/context POS
tagger, flat chunks with a subject guess, morphology flags and gazetteer
entities. Language knowledge lives in the tab-separated files under
``data/resources`` (or the directory named by ``REQLINT_RESOURCES``).
"""

from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import snowballstemmer

from .docmodel import Block, BlockKind, DocConfig, Document, Span
from .errors import ResourceError

RESOURCES_ENV = "REQLINT_RESOURCES"
DEFAULT_RESOURCE_DIR = Path(__file__).parent / "data" / "resources"


class PosTag(str, enum.Enum):
    NOUN = "NOUN"
    PROPN = "PROPN"
    PRON = "PRON"
    VERB = "VERB"
    AUX = "AUX"
    ADJ = "ADJ"
    ADV = "ADV"
    ADP = "ADP"
    DET = "DET"
    CONJ = "CONJ"
    NUM = "NUM"
    PART = "PART"
    PUNCT = "PUNCT"
    X = "X"


class MorphFlag(str, enum.Enum):
    Plural = "Plural"
    PastTense = "PastTense"
    Gerund = "Gerund"
    Comparative = "Comparative"
    Superlative = "Superlative"
    ThirdPersonSingular = "ThirdPersonSingular"


class ChunkLabel(str, enum.Enum):
    NP = "NP"
    VP = "VP"
    PP = "PP"
    SBAR = "SBAR"
    O = "O"


@dataclass(frozen=True)
class Token:
    span: Span
    text: str
    lemma: str = ""
    stem: str = ""
    pos: PosTag = PosTag.X
    morph: frozenset[MorphFlag] = frozenset()

    @property
    def lower(self) -> str:
        return self.text.lower()


@dataclass(frozen=True)
class Sentence:
    span: Span
    start: int  # token index range [start, end)
    end: int


@dataclass(frozen=True)
class Chunk:
    label: ChunkLabel
    start: int  # token index range [start, end)
    end: int
    is_subject: bool = False


@dataclass(frozen=True)
class Entity:
    span: Span
    label: str


@dataclass(frozen=True)
class AnnotationSet:
    block: int
    tokens: tuple[Token, ...] = ()
    sentences: tuple[Sentence, ...] = ()
    chunks: tuple[Chunk, ...] = ()
    entities: tuple[Entity, ...] = ()
    prefix_end: int = 0  # tokens before this index belong to the requirement-ID prefix

    def sentence_tokens(self, sentence: Sentence) -> tuple[Token, ...]:
        return self.tokens[sentence.start:sentence.end]

    def sentence_chunks(self, sentence: Sentence) -> list[Chunk]:
        return [c for c in self.chunks if sentence.start <= c.start < sentence.end]

    def sentence_text(self, text: str, sentence: Sentence) -> str:
        return text[sentence.span.start:sentence.span.end]


# --------------------------------------------------------------------------
# resources


@dataclass(frozen=True)
class LexEntry:
    tag: PosTag
    feature: str = ""


@dataclass(frozen=True)
class NlpResources:
    lemma_exceptions: dict[str, str] = field(default_factory=dict)
    abbreviations: frozenset[str] = frozenset()
    lexicon: dict[str, LexEntry] = field(default_factory=dict)
    gazetteer: dict[str, str] = field(default_factory=dict)

    def __hash__(self) -> int:
        return id(self)

    def has_feature(self, word: str, feature: str) -> bool:
        entry = self.lexicon.get(word.lower())
        return entry is not None and entry.feature == feature


def read_tsv(path: Path, min_fields: int = 2) -> list[list[str]]:
    """Read a ``key<TAB>value`` file, skipping blank and ``#`` lines."""
    rows = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ResourceError(f"cannot read resource {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < min_fields or not parts[0]:
            raise ResourceError(f"{path}:{lineno}: expected {min_fields} tab-separated fields")
        rows.append(parts)
    return rows


def resource_dir() -> Path:
    override = os.environ.get(RESOURCES_ENV)
    return Path(override) if override else DEFAULT_RESOURCE_DIR


@lru_cache(maxsize=8)
def _load(directory: str) -> NlpResources:
    d = Path(directory)
    exceptions = {k.lower(): v.lower() for k, v, *_ in read_tsv(d / "lemma_exceptions.tsv")}
    abbreviations = frozenset(r[0].lower() for r in read_tsv(d / "abbreviations.tsv"))
    lexicon = {}
    for word, tag, *rest in read_tsv(d / "lexicon.tsv"):
        try:
            lexicon[word.lower()] = LexEntry(PosTag(tag), rest[0] if rest else "")
        except ValueError:
            raise ResourceError(f"{d / 'lexicon.tsv'}: unknown tag {tag!r} for {word!r}") from None
    gazetteer = {}
    gaz_path = d / "gazetteer.tsv"
    if gaz_path.exists():
        gazetteer = {k: v for k, v, *_ in read_tsv(gaz_path)}
    return NlpResources(exceptions, abbreviations, lexicon, gazetteer)


def load_resources(directory: str | Path | None = None) -> NlpResources:
    """Load (and cache) the language resources from *directory*."""
    return _load(str(Path(directory) if directory else resource_dir()))


# --------------------------------------------------------------------------
# tokens and sentences


@lru_cache(maxsize=8)
def _token_re(abbreviations: frozenset[str]) -> re.Pattern:
    alts = "|".join(re.escape(a) for a in sorted(abbreviations, key=len, reverse=True))
    abbr = rf"(?<![\w.])(?:{alts})(?!\w)" if alts else r"(?!x)x"
    return re.compile(
        rf"(?P<abbr>{abbr})"
        r"|(?P<num>\d+(?:[.,]\d+)+)"
        r"|(?P<word>\w+(?:[-'’]\w+)*)"
        r"|(?P<punct>[^\w\s])",
        re.IGNORECASE,
    )


def tokenize(text: str, resources: NlpResources | None = None) -> list[Token]:
    """Split *text* into word, number, abbreviation and punctuation tokens."""
    resources = resources or load_resources()
    return [
        Token(Span(m.start(), m.end()), m.group(0))
        for m in _token_re(resources.abbreviations).finditer(text)
    ]


_TERMINALS = frozenset(".?!")


def split_sentences(tokens: Sequence[Token],
                    resources: NlpResources | None = None) -> list[Sentence]:
    resources = resources or load_resources()
    abbreviations = resources.abbreviations
    sentences = []
    start = 0
    for i, tok in enumerate(tokens):
        if tok.text not in _TERMINALS:
            continue
        if tok.text == "." and i > start and tokens[i - 1].lower + "." in abbreviations:
            continue
        sentences.append(_sentence(tokens, start, i + 1))
        start = i + 1
    if start < len(tokens):
        sentences.append(_sentence(tokens, start, len(tokens)))
    return sentences


def _sentence(tokens: Sequence[Token], start: int, end: int) -> Sentence:
    return Sentence(Span(tokens[start].span.start, tokens[end - 1].span.end), start, end)


# --------------------------------------------------------------------------
# lemmas and stems

_VOWELS = set("aeiouy")
_MAX_PASSES = 12


def _has_vowel(s: str) -> bool:
    return any(c in _VOWELS for c in s)


def _undouble(stem: str) -> str:
    if len(stem) > 2 and stem[-1] == stem[-2] and stem[-1] not in "aeiouylsz":
        return stem[:-1]
    return stem


def _lemma_step(w: str, exceptions: dict[str, str]) -> str:
    if w in exceptions:
        return exceptions[w]
    if not w.isalpha():
        return w
    n = len(w)
    if n > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if n > 4 and w.endswith("es") and w[:-2].endswith(("ss", "x", "z", "ch", "sh")):
        return w[:-2]
    if n > 3 and w.endswith("s") and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    if n > 5 and w.endswith("ing") and _has_vowel(w[:-3]):
        return _undouble(w[:-3])
    if n > 4 and w.endswith("ed") and not w.endswith("eed") and _has_vowel(w[:-2]):
        return _undouble(w[:-2])
    return w


def lemmatize(word: str, resources: NlpResources | None = None) -> str:
    """Lowercase dictionary form of *word*; idempotent by construction.

    The suffix rules are applied until a fixed point is reached, so a
    lemma is never reduced further by a second call.
    """
    exceptions = (resources or load_resources()).lemma_exceptions
    w = word.lower()
    for _ in range(_MAX_PASSES):
        nxt = _lemma_step(w, exceptions)
        if nxt == w or not nxt:
            break
        w = nxt
    return w or word.lower()


_stemmer = snowballstemmer.stemmer("english")


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Porter2 stem of *word*, iterated to a fixed point."""
    w = word.lower()
    if not w.isalpha():
        return w
    for _ in range(_MAX_PASSES):
        nxt = _stemmer.stemWord(w)
        if nxt == w or not nxt:
            break
        w = nxt
    return w


# --------------------------------------------------------------------------
# part-of-speech tags

_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence", "ism",
                  "ship", "ure", "age", "ery", "ist", "dom")
_ADJ_SUFFIXES = ("able", "ible", "al", "ful", "ous", "ive", "less", "ic", "ary",
                 "ant", "ent", "ish")
_VERB_SUFFIXES = ("ize", "ise", "ify", "ate")
_OPEN_NOUN = LexEntry(PosTag.NOUN)
_NOMINAL = {PosTag.NOUN, PosTag.PROPN, PosTag.PRON}
_VERBAL = {PosTag.VERB, PosTag.AUX}


def _is_word(text: str) -> bool:
    return text[:1].isalnum() or any(c.isalnum() for c in text)


_NUMBER = re.compile(r"\d+(?:[.,]\d+)*")


def pos_tag(tokens: Sequence[Token] | Sequence[str],
            resources: NlpResources | None = None) -> list[PosTag]:
    """Tag one sentence.

    Precedence: punctuation and numbers, the closed-class lexicon,
    contextual rules (verb slots after modals, ``to`` and subject
    pronouns; ``-ed``/``-ing`` after determiners), suffix heuristics,
    soft lexicon hints, capitalisation, and NOUN as the default.
    """
    resources = resources or load_resources()
    lex = resources.lexicon
    texts = [t if isinstance(t, str) else t.text for t in tokens]
    tags: list[PosTag | None] = [None] * len(texts)

    for i, text in enumerate(texts):
        low = text.lower()
        if not _is_word(text):
            tags[i] = PosTag.PUNCT
        elif _NUMBER.fullmatch(text):
            tags[i] = PosTag.NUM
        elif low in lex and lex[low].feature != "soft":
            tags[i] = lex[low].tag
        elif low.endswith(".") and low in resources.abbreviations:
            tags[i] = PosTag.X

    verb_seen = False
    for i, text in enumerate(texts):
        if tags[i] is not None:
            if tags[i] in _VERBAL:
                verb_seen = True
            continue
        low = text.lower()
        j = i - 1
        while j >= 0 and (tags[j] is PosTag.ADV or tags[j] is PosTag.PART):
            j -= 1
        prev = tags[j] if j >= 0 else None
        prev_low = texts[j].lower() if j >= 0 else ""
        after_modal = prev is PosTag.AUX and resources.has_feature(prev_low, "modal")
        after_to = prev is PosTag.ADP and resources.has_feature(prev_low, "infinitive")
        after_aux = prev is PosTag.AUX
        hint = lex.get(low)
        noun_hint = hint is not None and hint.tag is PosTag.NOUN

        if "-" in text and re.search(r"\d", text):
            tag = PosTag.PROPN
        elif after_modal or (after_to and not low.endswith(("ing", "s"))):
            tag = PosTag.VERB
        elif low.endswith("ly") and len(low) > 4:
            tag = PosTag.ADV
        elif low.endswith("ed") and len(low) > 4 and not noun_hint:
            attributive = prev in (PosTag.DET, PosTag.ADP, PosTag.ADJ) or (
                prev is None and i + 1 < len(texts) and _is_word(texts[i + 1])
                and lex.get(texts[i + 1].lower(), _OPEN_NOUN).tag in (PosTag.NOUN, PosTag.ADJ))
            tag = PosTag.ADJ if attributive else PosTag.VERB
        elif low.endswith("ing") and len(low) > 5 and not noun_hint:
            tag = PosTag.NOUN if prev in (PosTag.DET, PosTag.ADJ, None) else PosTag.VERB
        elif low.endswith("est") and len(low) > 5 and prev is PosTag.DET:
            tag = PosTag.ADJ
        elif (not verb_seen and prev in (PosTag.NOUN, PosTag.PROPN, PosTag.PRON)
              and low.endswith("s") and not low.endswith(("ss", "us", "is"))
              and (prev is PosTag.PRON or j == 0 or tags[j - 1] in (PosTag.DET, PosTag.ADJ, PosTag.NOUN, PosTag.PROPN))):
            tag = PosTag.VERB
        elif (not verb_seen and prev is PosTag.PRON
              and prev_low in ("it", "they", "he", "she", "we", "you", "i", "which", "who")):
            tag = PosTag.VERB
        elif hint is not None:
            tag = hint.tag
        elif after_aux and low.endswith(_ADJ_SUFFIXES):
            tag = PosTag.ADJ
        elif low.endswith(_NOUN_SUFFIXES) and len(low) > 5:
            tag = PosTag.NOUN
        elif low.endswith(_ADJ_SUFFIXES) and len(low) > 5 and prev in (PosTag.DET, PosTag.ADV, None) and i + 1 < len(texts) and _is_word(texts[i + 1]) and texts[i + 1].lower() not in lex:
            tag = PosTag.ADJ
        elif low.endswith(_VERB_SUFFIXES) and len(low) > 5 and prev in (PosTag.NOUN, PosTag.PROPN) and not verb_seen:
            tag = PosTag.VERB
        elif text[:1].isupper() and i > 0 and prev is not PosTag.PUNCT:
            tag = PosTag.PROPN
        elif text.isupper() and len(text) > 1:
            tag = PosTag.PROPN
        else:
            tag = PosTag.NOUN
        tags[i] = tag
        if tag in _VERBAL:
            verb_seen = True

    # demonstratives standing alone act as pronouns: "This shall ..."
    for i, text in enumerate(texts):
        if tags[i] is PosTag.DET and resources.has_feature(text, "demonstrative"):
            nxt = tags[i + 1] if i + 1 < len(texts) else None
            if nxt not in (PosTag.NOUN, PosTag.PROPN, PosTag.ADJ, PosTag.NUM):
                tags[i] = PosTag.PRON
    return [t if t is not None else PosTag.NOUN for t in tags]


def morphology(text: str, tag: PosTag, lemma: str) -> frozenset[MorphFlag]:
    low = text.lower()
    flags = set()
    if tag in (PosTag.NOUN, PosTag.PROPN) and low != lemma and low.endswith("s"):
        flags.add(MorphFlag.Plural)
    if tag in _VERBAL:
        if low.endswith("ed") or low in ("was", "were", "had", "did"):
            flags.add(MorphFlag.PastTense)
        elif low.endswith("ing"):
            flags.add(MorphFlag.Gerund)
        elif low in ("is", "has", "does") or (low.endswith("s") and low != lemma):
            flags.add(MorphFlag.ThirdPersonSingular)
    if tag is PosTag.ADJ:
        if low.endswith("est") and len(low) > 5:
            flags.add(MorphFlag.Superlative)
        elif low.endswith("er") and len(low) > 4:
            flags.add(MorphFlag.Comparative)
    return frozenset(flags)


# --------------------------------------------------------------------------
# chunks


def match_np(tags: Sequence[PosTag], i: int) -> int | None:
    """End index of the noun phrase (DET)(ADJ|NUM)*(NOUN|PROPN|PRON)+ at *i*."""
    n = len(tags)
    j = i
    if j < n and tags[j] is PosTag.DET:
        j += 1
    while j < n and tags[j] in (PosTag.ADJ, PosTag.NUM):
        j += 1
    k = j
    while k < n and tags[k] in _NOMINAL:
        k += 1
    return k if k > j else None


def _clause_end(texts: Sequence[str], tags: Sequence[PosTag], i: int) -> int:
    n = len(texts)
    j = i + 1
    while j < n and texts[j] not in (",", ";"):
        j += 1
    if j == n and n > i + 1 and texts[-1] in _TERMINALS:
        j -= 1
    return j


def chunk(tokens: Sequence[Token] | Sequence[str], tags: Sequence[PosTag],
          resources: NlpResources | None = None) -> list[Chunk]:
    """Group a tagged sentence into flat NP/VP/PP/SBAR/O chunks.

    Subordinate clauses run from their conjunction up to the next comma and
    are not chunked internally. The subject is the first NP ahead of the
    first main-clause VP; a comma-terminated NP is only taken when no other
    NP is available (it is usually a fronted adverbial).
    """
    resources = resources or load_resources()
    texts = [t if isinstance(t, str) else t.text for t in tokens]
    n = len(texts)
    chunks: list[Chunk] = []
    i = 0
    while i < n:
        tag = tags[i]
        low = texts[i].lower()
        if tag is PosTag.CONJ and resources.has_feature(low, "sub"):
            end = _clause_end(texts, tags, i)
            chunks.append(Chunk(ChunkLabel.SBAR, i, end))
            i = end
            continue
        if tag is PosTag.ADP and resources.has_feature(low, "sub"):
            end = _clause_end(texts, tags, i)
            if any(t in _VERBAL for t in tags[i + 1:end]):
                chunks.append(Chunk(ChunkLabel.SBAR, i, end))
                i = end
                continue
        if tag is PosTag.ADP:
            end = match_np(tags, i + 1)
            if end is not None:
                chunks.append(Chunk(ChunkLabel.PP, i, end))
                i = end
                continue
        end = match_np(tags, i)
        if end is not None:
            chunks.append(Chunk(ChunkLabel.NP, i, end))
            i = end
            continue
        if tag in _VERBAL:
            j = i + 1
            while j < n and tags[j] in (PosTag.AUX, PosTag.VERB, PosTag.PART, PosTag.ADV):
                j += 1
            chunks.append(Chunk(ChunkLabel.VP, i, j))
            i = j
            continue
        chunks.append(Chunk(ChunkLabel.O, i, i + 1))
        i += 1

    first_vp = next((k for k, c in enumerate(chunks) if c.label is ChunkLabel.VP), None)
    if first_vp is None:
        return chunks
    candidates = [k for k in range(first_vp) if chunks[k].label is ChunkLabel.NP]
    if not candidates:
        return chunks

    def comma_after(k: int) -> bool:
        end = chunks[k].end
        return end < n and texts[end] == ","

    subject = next((k for k in candidates if not comma_after(k)), candidates[0])
    chunks[subject] = replace(chunks[subject], is_subject=True)
    return chunks


# --------------------------------------------------------------------------
# entities and the composed annotator


@lru_cache(maxsize=8)
def _phrase_index(resources: NlpResources) -> tuple[dict[tuple[str, ...], str], int, frozenset[str]]:
    bare = NlpResources()
    phrases = {}
    for phrase, label in resources.gazetteer.items():
        key = tuple(t.lower for t in tokenize(phrase, bare))
        if key:
            phrases[key] = label
    return phrases, max((len(k) for k in phrases), default=0), frozenset(k[0] for k in phrases)


def find_entities(tokens: Sequence[Token], resources: NlpResources | None = None) -> list[Entity]:
    """Longest gazetteer matches over token sequences, case-insensitive."""
    phrases, longest, firsts = _phrase_index(resources or load_resources())
    if not phrases or not tokens:
        return []
    lows = [t.text.lower() for t in tokens]
    out = []
    i = 0
    while i < len(tokens):
        if lows[i] not in firsts:
            i += 1
            continue
        for size in range(min(longest, len(tokens) - i), 0, -1):
            label = phrases.get(tuple(lows[i:i + size]))
            if label is not None:
                out.append(Entity(Span(tokens[i].span.start, tokens[i + size - 1].span.end), label))
                i += size
                break
        else:
            i += 1
    return out


@lru_cache(maxsize=65536)
def _word_features(text: str, tag: PosTag, resources: NlpResources):
    lemma = lemmatize(text, resources)
    return lemma, stem(text), morphology(text, tag, lemma)


def annotate_text(text: str, block_index: int = 0, *, prefix_len: int = 0,
                  resources: NlpResources | None = None) -> AnnotationSet:
    """Annotate one piece of text; the first *prefix_len* characters are an ID label."""
    resources = resources or load_resources()
    raw = tokenize(text, resources)
    prefix_end = 0
    while prefix_end < len(raw) and raw[prefix_end].span.end <= prefix_len:
        prefix_end += 1
    sentences = split_sentences(raw, resources)
    tokens: list[Token] = []
    chunks: list[Chunk] = []
    for sent in sentences:
        body_start = max(sent.start, min(prefix_end, sent.end))
        sent_tokens = raw[sent.start:sent.end]
        tags = [PosTag.X if k < prefix_end and raw[k].text[:1].isalnum() else PosTag.PUNCT
                for k in range(sent.start, body_start)]
        tags += pos_tag(raw[body_start:sent.end], resources)
        for tok, tag in zip(sent_tokens, tags):
            lemma, stem_, morph = _word_features(tok.text, tag, resources)
            tokens.append(Token(tok.span, tok.text, lemma, stem_, tag, morph))
        for k in range(sent.start, body_start):
            chunks.append(Chunk(ChunkLabel.O, k, k + 1))
        body = chunk(raw[body_start:sent.end], tags[body_start - sent.start:], resources)
        chunks.extend(Chunk(c.label, c.start + body_start, c.end + body_start, c.is_subject)
                      for c in body)
    return AnnotationSet(
        block=block_index,
        tokens=tuple(tokens),
        sentences=tuple(sentences),
        chunks=tuple(chunks),
        entities=tuple(find_entities(tokens, resources)),
        prefix_end=prefix_end,
    )


def requirement_prefix_length(block: Block, config: DocConfig | None = None) -> int:
    if block.kind is not BlockKind.Requirement:
        return 0
    m = (config or DocConfig()).compiled_id_pattern().match(block.text)
    return m.end() if m else 0


def annotate_block(block: Block, config: DocConfig | None = None,
                   resources: NlpResources | None = None) -> AnnotationSet:
    return annotate_text(block.text, block.index,
                         prefix_len=requirement_prefix_length(block, config),
                         resources=resources)


def annotate(doc: Document, config: DocConfig | None = None,
             resources: NlpResources | None = None) -> list[AnnotationSet]:
    """One AnnotationSet per block, in block order.

    Raises ResourceError when the language resources cannot be loaded.
    """
    resources = resources or load_resources()
    return [annotate_block(b, config, resources) for b in doc.blocks]


def sentence_words(tokens: Iterable[Token]) -> list[str]:
    return [t.lower for t in tokens if _is_word(t.text)]
