"""Plain-text requirements documents split into sections and typed blocks.

The input convention is line oriented:

* ``#``-prefixed lines are headings; the number of markers is the level.
* A paragraph whose first line matches the requirement-ID pattern is a
  requirement. Continuation lines up to the next blank line belong to it.
* Lines under a heading titled ``References`` are reference entries.
* ``- item``, ``* item`` and ``3) item`` lines are enumeration items.
* ``Figure N:`` lines are figure captions; ``Table N:`` and ``|``-prefixed
  lines are table rows.
* Lines starting with the comment marker are comments.
* Everything else is informative text, grouped into paragraphs.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import PatternError

if TYPE_CHECKING:
    from .catalog import ContextKind

DEFAULT_ID_PATTERN = r"^[A-Z][A-Z0-9]*-[0-9]+:"

_FIGURE_RE = re.compile(r"(?:Figure|Fig\.)\s+\d+\s*:")
_TABLE_RE = re.compile(r"Table\s+\d+\s*:|\|")
_ENUM_RE = re.compile(r"(?:[-*]|\d+\))\s")


class BlockKind(str, enum.Enum):
    Heading = "Heading"
    Requirement = "Requirement"
    Informative = "Informative"
    EnumerationItem = "EnumerationItem"
    TableRow = "TableRow"
    FigureCaption = "FigureCaption"
    ReferenceEntry = "ReferenceEntry"
    Comment = "Comment"


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def contains(self, other: Span) -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class Block:
    index: int
    kind: BlockKind
    span: Span
    text: str
    section_path: tuple[int, ...] = ()
    requirement_id: str | None = None
    level: int = 0  # heading level, 0 for non-headings

    @property
    def title(self) -> str:
        """Heading text without the markers (empty for other kinds)."""
        if self.kind is not BlockKind.Heading:
            return ""
        return self.text.lstrip("#").strip()


@dataclass(frozen=True)
class Section:
    heading_block: int
    level: int
    blocks: tuple[int, ...] = ()
    children: tuple[int, ...] = ()
    parent: int | None = None


@dataclass(frozen=True)
class DocConfig:
    requirement_id_pattern: str = DEFAULT_ID_PATTERN
    heading_marker: str = "#"
    references_heading_title: str = "References"
    comment_marker: str = "//"

    def compiled_id_pattern(self) -> re.Pattern:
        try:
            return re.compile(self.requirement_id_pattern)
        except re.error as exc:
            raise PatternError(
                f"requirement_id_pattern {self.requirement_id_pattern!r}: {exc}"
            ) from None

    def validate(self) -> None:
        self.compiled_id_pattern()
        for name in ("heading_marker", "references_heading_title", "comment_marker"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")


@dataclass(frozen=True)
class Document:
    source: str
    blocks: tuple[Block, ...] = ()
    sections: tuple[Section, ...] = ()
    intro_section: int | None = None
    name: str = "<string>"
    roots: tuple[int, ...] = field(default=(), repr=False)

    def section_of(self, block: Block) -> Section | None:
        if not block.section_path:
            return None
        heading = block.section_path[-1]
        for sec in self.sections:
            if sec.heading_block == heading:
                return sec
        return None


def _extract_id(match: re.Match) -> str:
    if "id" in match.re.groupindex:
        return match.group("id")
    if match.re.groups:
        return match.group(1)
    return match.group(0).strip().rstrip(":").strip()


class _Builder:
    def __init__(self, source: str, config: DocConfig, name: str):
        self.source = source
        self.config = config
        self.name = name
        self.id_re = config.compiled_id_pattern()
        self.blocks: list[Block] = []
        # mutable section records: [heading_block, level, blocks, children, parent]
        self.sections: list[list] = []
        self.stack: list[int] = []  # open section indices, outermost first
        self.para: tuple[BlockKind, int, int, str | None] | None = None

    def path(self) -> tuple[int, ...]:
        return tuple(self.sections[s][0] for s in self.stack)

    def emit(self, kind: BlockKind, start: int, end: int,
             requirement_id: str | None = None, level: int = 0) -> None:
        index = len(self.blocks)
        self.blocks.append(Block(
            index=index, kind=kind, span=Span(start, end),
            text=self.source[start:end], section_path=self.path(),
            requirement_id=requirement_id, level=level,
        ))
        if self.stack and kind is not BlockKind.Heading:
            self.sections[self.stack[-1]][2].append(index)

    def close_paragraph(self) -> None:
        if self.para is not None:
            kind, start, end, rid = self.para
            self.emit(kind, start, end, requirement_id=rid)
            self.para = None

    def open_section(self, level: int, start: int, end: int) -> None:
        while self.stack and self.sections[self.stack[-1]][1] >= level:
            self.stack.pop()
        parent = self.stack[-1] if self.stack else None
        sec_index = len(self.sections)
        self.sections.append([len(self.blocks), level, [], [], parent])
        if parent is not None:
            self.sections[parent][3].append(sec_index)
        self.stack.append(sec_index)
        self.emit(BlockKind.Heading, start, end, level=level)

    def build(self) -> Document:
        cfg = self.config
        marker = cfg.heading_marker
        in_references = False
        offset = 0
        for line in self.source.split("\n"):
            line_start, offset = offset, offset + len(line) + 1
            if not line.strip():
                self.close_paragraph()
                continue
            start = line_start + (len(line) - len(line.lstrip()))
            end = line_start + len(line.rstrip())
            text = self.source[start:end]

            if text.startswith(marker):
                self.close_paragraph()
                level = 0
                while text.startswith(marker * (level + 1)):
                    level += 1
                self.open_section(level, start, end)
                title = text[len(marker) * level:].strip()
                in_references = title.lower() == cfg.references_heading_title.lower()
                continue

            kind = None
            if text.startswith(cfg.comment_marker):
                kind = BlockKind.Comment
            elif in_references:
                kind = BlockKind.ReferenceEntry
            elif _FIGURE_RE.match(text):
                kind = BlockKind.FigureCaption
            elif _TABLE_RE.match(text):
                kind = BlockKind.TableRow
            elif _ENUM_RE.match(text):
                kind = BlockKind.EnumerationItem
            if kind is not None:
                self.close_paragraph()
                self.emit(kind, start, end)
                continue

            id_match = self.id_re.match(text)
            if id_match:
                self.close_paragraph()
                self.para = (BlockKind.Requirement, start, end, _extract_id(id_match))
            elif self.para is not None:
                kind, pstart, _, rid = self.para
                self.para = (kind, pstart, end, rid)
            else:
                self.para = (BlockKind.Informative, start, end, None)
        self.close_paragraph()

        sections = tuple(
            Section(heading_block=h, level=lvl, blocks=tuple(bs),
                    children=tuple(cs), parent=p)
            for h, lvl, bs, cs, p in self.sections
        )
        roots = tuple(i for i, s in enumerate(sections) if s.parent is None)
        return Document(
            source=self.source,
            blocks=tuple(self.blocks),
            sections=sections,
            intro_section=roots[0] if roots else None,
            name=self.name,
            roots=roots,
        )


def parse_document(source: str, config: DocConfig | None = None,
                   name: str = "<string>") -> Document:
    """Split *source* into typed blocks and a section tree.

    Raises PatternError when the requirement-ID pattern does not compile.
    """
    config = config or DocConfig()
    config.validate()
    return _Builder(source, config, name).build()


_CONTEXT_KINDS = {
    "Requirement": BlockKind.Requirement,
    "Heading": BlockKind.Heading,
    "Figure": BlockKind.FigureCaption,
    "Table": BlockKind.TableRow,
    "Reference": BlockKind.ReferenceEntry,
    "Enumeration": BlockKind.EnumerationItem,
    "Comment": BlockKind.Comment,
}


def context_block_kind(context: ContextKind | str) -> BlockKind | None:
    """Block kind a specific context maps to; None for Anywhere/Unclassified."""
    return _CONTEXT_KINDS.get(getattr(context, "value", context))


def blocks_in_context(doc: Document, context: ContextKind | str) -> list[Block]:
    name = getattr(context, "value", context)
    if name == "Anywhere":
        return [b for b in doc.blocks if b.kind is not BlockKind.Comment]
    kind = _CONTEXT_KINDS.get(name)
    if kind is None:
        return []
    return [b for b in doc.blocks if b.kind is kind]


def is_intro_section(doc: Document, block: Block) -> bool:
    """True for blocks in the first top-level section or in the preamble."""
    if not block.section_path:
        return True
    if doc.intro_section is None:
        return False
    return block.section_path[0] == doc.sections[doc.intro_section].heading_block
