"""Plain-text theme and story documents, corpus loading and OWL export.

Both document kinds share one block grammar::

    the desire for vengeance
    ========================

    :: Description
    A character seeks retribution over a perceived injury or wrong.

    :: Aliases
    vengeance

A block is a header line, an underline of at least three ``=``, a blank line
and any number of ``:: Field`` sections. A section body runs until the next
blank line. Parsing never stops on bad content: a malformed block is skipped
with an error diagnostic carrying its line number.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from .diagnostics import ERROR, WARNING, Diagnostic, UnknownStoryError
from .ontology import Theme, ThemeOntology, build_ontology, normalize_name

__all__ = [
    "THEME_FIELDS",
    "STORY_FIELDS",
    "TIERS",
    "Annotation",
    "AnnotatedCorpus",
    "StoryEntry",
    "export_owl",
    "iri_fragment",
    "load_corpus",
    "parse_story_document",
    "parse_theme_document",
    "read_text",
    "serialize_story_document",
    "serialize_theme_document",
]

THEME_FIELDS = ("Description", "Parents", "Aliases", "References", "Examples", "Notes")
TIER_FIELDS = {"Choice Themes": "choice", "Major Themes": "major", "Minor Themes": "minor"}
STORY_FIELDS = ("Title", "Date", "Collection", "Description", *TIER_FIELDS)
TIERS = ("choice", "major", "minor")
_TIER_RANK = {t: i for i, t in enumerate(TIERS)}

_DATE_RE = re.compile(r"^\d{4}(-\d{2}-\d{2}|-\d{4})?$")
_ANNOTATION_RE = re.compile(r"^(?P<theme>.*?)(?: \[(?P<comment>.*)\])?$")


# ---------------------------------------------------------------- blocks


class _Section(NamedTuple):
    field: str
    line: int
    body: list[tuple[int, str]]


@dataclass
class _Block:
    header: str
    line: int
    sections: list[_Section] = field(default_factory=list)
    failed: bool = False


def _is_underline(line: str) -> bool:
    s = line.strip()
    return len(s) >= 3 and s.strip("=") == ""


class _Reader:
    """Splits a document into blocks, collecting grammar diagnostics."""

    def __init__(self, text: str, filename: str | None):
        self.filename = filename
        self.diagnostics: list[Diagnostic] = []
        if text.startswith("\ufeff"):
            text = text[1:]
            self.warn("BOM", "byte-order mark removed", line=1)
        if "\r" in text:
            self.warn("CRLF", "carriage returns normalized to LF", line=1)
            text = text.replace("\r\n", "\n").replace("\r", "\n")
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()

    def warn(self, code, message, line=None, theme=None):
        self.diagnostics.append(Diagnostic(WARNING, code, message, theme, self.filename, line))

    def error(self, code, message, line=None, theme=None):
        self.diagnostics.append(Diagnostic(ERROR, code, message, theme, self.filename, line))

    def _is_header(self, i: int) -> bool:
        lines = self.lines
        return (
            i + 1 < len(lines)
            and lines[i].strip() != ""
            and not lines[i].startswith("::")
            and not _is_underline(lines[i])
            and _is_underline(lines[i + 1])
        )

    def blocks(self) -> list[_Block]:
        lines = self.lines
        n = len(lines)
        out = []
        i = 0
        while i < n:
            if not lines[i].strip():
                i += 1
                continue
            if not self._is_header(i):
                if lines[i].startswith("::"):
                    self.error("ORPHAN_SECTION", "section outside of any block", line=i + 1)
                elif _is_underline(lines[i]):
                    self.error("MISSING_HEADER", "underline without a header line", line=i + 1)
                else:
                    self.error(
                        "MISSING_UNDERLINE",
                        f"header {lines[i].strip()!r} is not followed by an '=' underline",
                        line=i + 1,
                    )
                i += 1
                while i < n and not self._is_header(i):
                    i += 1
                continue
            end = i + 2
            while end < n and not self._is_header(end):
                end += 1
            out.append(self._block(i, end))
            i = end
        return out

    def _block(self, start: int, end: int) -> _Block:
        lines = self.lines
        raw = lines[start]
        header = raw.strip()
        block = _Block(header=unicodedata.normalize("NFC", header), line=start + 1)
        if raw != header:
            self.warn("HEADER_WHITESPACE", "surrounding whitespace removed from header", start + 1, block.header)
        j = start + 2
        if j < end and lines[j].strip():
            self.error("MISSING_BLANK", "expected a blank line after the underline", j + 1, block.header)
            block.failed = True
            return block
        seen = set()
        while j < end:
            line = lines[j]
            if not line.strip():
                j += 1
                continue
            if not line.startswith("::"):
                self.error("BAD_SECTION", f"expected ':: Field', found {line.strip()!r}", j + 1, block.header)
                block.failed = True
                return block
            name = line[2:].strip()
            if not name:
                self.error("BAD_SECTION", "section header without a field name", j + 1, block.header)
                block.failed = True
                return block
            if name in seen:
                self.error("DUP_SECTION", f"section {name!r} repeated", j + 1, block.header)
                block.failed = True
                return block
            seen.add(name)
            section = _Section(name, j + 1, [])
            j += 1
            while j < end and lines[j].strip():
                if lines[j].startswith("::"):
                    self.error(
                        "MISSING_BLANK", "sections must be separated by a blank line", j + 1, block.header
                    )
                    block.failed = True
                    return block
                section.body.append((j + 1, lines[j].strip()))
                j += 1
            if not section.body:
                self.warn("EMPTY_SECTION", f"section {name!r} is empty", section.line, block.header)
            block.sections.append(section)
        return block


def _text(section: _Section) -> str:
    return "\n".join(text for _, text in section.body)


def _name_list(reader: _Reader, block: _Block, section: _Section) -> list[str] | None:
    out = []
    for lineno, text in section.body:
        try:
            name = normalize_name(text)
        except ValueError as exc:
            reader.error("BAD_NAME", str(exc), lineno, block.header)
            return None
        if name in out:
            reader.warn("DUP_ENTRY", f"{name!r} repeated in {section.field}", lineno, block.header)
            continue
        if name == block.header:
            reader.error("SELF_REFERENCE", f"{name!r} lists itself in {section.field}", lineno, block.header)
            return None
        out.append(name)
    return out


def _decode(text: str | bytes) -> str:
    if isinstance(text, (bytes, bytearray)):
        return bytes(text).decode("utf-8")
    return text


# ---------------------------------------------------------------- themes


def parse_theme_document(
    text: str | bytes, filename: str | None = None
) -> tuple[list[Theme], list[Diagnostic]]:
    """Parse a theme document into themes plus diagnostics.

    Only undecodable bytes raise (``UnicodeDecodeError``).
    """
    reader = _Reader(_decode(text), filename)
    themes = []
    for block in reader.blocks():
        if block.failed:
            continue
        theme = _theme_from_block(reader, block)
        if theme is not None:
            themes.append(theme)
    return themes, reader.diagnostics


def _theme_from_block(reader: _Reader, block: _Block) -> Theme | None:
    values: dict = {}
    extra = []
    for section in block.sections:
        f = section.field
        if f in ("Parents", "Aliases"):
            names = _name_list(reader, block, section)
            if names is None:
                return None
            values[f.lower()] = tuple(names)
        elif f == "References":
            values["references"] = tuple(text for _, text in section.body)
        elif f == "Description":
            values["definition"] = _text(section)
        elif f in ("Examples", "Notes"):
            values[f.lower()] = _text(section)
        else:
            reader.warn("UNKNOWN_FIELD", f"unknown field {f!r} kept in Notes", section.line, block.header)
            extra.append(f"{f}: " + _text(section) if section.body else f"{f}:")
    if extra:
        values["notes"] = "\n".join([values["notes"], *extra] if values.get("notes") else extra)
    try:
        return Theme(name=block.header, **values)
    except ValueError as exc:
        reader.error("BAD_THEME", str(exc), block.line, block.header)
        return None


def _block_text(header: str, sections: list[tuple[str, list[str]]]) -> str:
    parts = [f"{header}\n{'=' * max(3, len(header))}"]
    for name, body in sections:
        if body:
            parts.append("\n".join([f":: {name}", *body]))
    return "\n\n".join(parts)


def _lines(text: str) -> list[str]:
    return [line.strip() for line in text.split("\n") if line.strip()] if text else []


def serialize_theme_document(themes: Iterable[Theme]) -> str:
    """Canonical text: themes sorted by name, fixed field order, empty fields omitted."""
    blocks = []
    for t in sorted(themes, key=lambda t: t.name):
        blocks.append(
            _block_text(
                t.name,
                [
                    ("Description", _lines(t.definition)),
                    ("Parents", list(t.parents)),
                    ("Aliases", list(t.aliases)),
                    ("References", [r.strip() for r in t.references if r.strip()]),
                    ("Examples", _lines(t.examples)),
                    ("Notes", _lines(t.notes)),
                ],
            )
        )
    return "\n\n\n".join(blocks) + "\n" if blocks else ""


# ---------------------------------------------------------------- stories


class Annotation(NamedTuple):
    theme: str
    tier: str
    comment: str | None = None

    def sort_key(self):
        return (_TIER_RANK[self.tier], self.theme)


@dataclass(frozen=True)
class StoryEntry:
    """A story and its tiered theme annotations.

    Annotations are kept in canonical order (tier, then theme name); a theme
    may appear only once per story.
    """

    story_id: str
    title: str = ""
    date: str = ""
    collection: str = ""
    description: str = ""
    annotations: tuple[Annotation, ...] = ()

    def __post_init__(self):
        sid = unicodedata.normalize("NFC", self.story_id).strip()
        if not sid or any(ch.isspace() for ch in sid):
            raise ValueError(f"story id must be a non-empty token: {self.story_id!r}")
        anns = []
        seen = set()
        for a in self.annotations:
            a = Annotation(normalize_name(a[0]), *a[1:])
            if a.tier not in _TIER_RANK:
                raise ValueError(f"{sid}: unknown tier {a.tier!r}")
            if a.theme in seen:
                raise ValueError(f"{sid}: theme {a.theme!r} annotated twice")
            seen.add(a.theme)
            anns.append(a)
        object.__setattr__(self, "story_id", sid)
        object.__setattr__(self, "annotations", tuple(sorted(anns, key=Annotation.sort_key)))

    @property
    def themes(self) -> list[str]:
        return [a.theme for a in self.annotations]

    def tier_of(self, theme: str) -> str | None:
        for a in self.annotations:
            if a.theme == theme:
                return a.tier
        return None


class AnnotatedCorpus:
    """Stories keyed by id, plus collection membership derived from them."""

    def __init__(self, stories: Iterable[StoryEntry] = ()):
        by_id: dict[str, StoryEntry] = {}
        for s in stories:
            if s.story_id in by_id:
                raise ValueError(f"duplicate story id {s.story_id!r}")
            by_id[s.story_id] = s
        self._stories = MappingProxyType(dict(sorted(by_id.items())))
        collections: dict[str, list[str]] = {}
        for sid, s in self._stories.items():
            if s.collection:
                collections.setdefault(s.collection, []).append(sid)
        self._collections = MappingProxyType(dict(sorted(collections.items())))

    @property
    def stories(self) -> Mapping[str, StoryEntry]:
        return self._stories

    @property
    def collections(self) -> Mapping[str, list[str]]:
        return self._collections

    def story(self, story_id: str) -> StoryEntry:
        try:
            return self._stories[story_id]
        except KeyError:
            raise UnknownStoryError(story_id) from None

    def ids(self) -> list[str]:
        return list(self._stories)

    def __len__(self):
        return len(self._stories)

    def __iter__(self):
        return iter(self._stories.values())

    def __contains__(self, story_id):
        return story_id in self._stories

    def __eq__(self, other):
        if not isinstance(other, AnnotatedCorpus):
            return NotImplemented
        return dict(self._stories) == dict(other._stories)

    def __repr__(self):
        return f"<AnnotatedCorpus stories={len(self)}>"


def parse_story_document(
    text: str | bytes, filename: str | None = None
) -> tuple[list[StoryEntry], list[Diagnostic]]:
    """Parse a story document; same block grammar as theme documents."""
    reader = _Reader(_decode(text), filename)
    stories = []
    for block in reader.blocks():
        if block.failed:
            continue
        story = _story_from_block(reader, block)
        if story is not None:
            stories.append(story)
    return stories, reader.diagnostics


def _story_from_block(reader: _Reader, block: _Block) -> StoryEntry | None:
    if any(ch.isspace() for ch in block.header):
        reader.error("BAD_STORY_ID", f"story id {block.header!r} contains whitespace", block.line, block.header)
        return None
    values: dict = {}
    annotations: list[Annotation] = []
    seen: dict[str, str] = {}
    for section in sorted(block.sections, key=lambda s: (_TIER_RANK.get(TIER_FIELDS.get(s.field), -1), s.line)):
        f = section.field
        if f in TIER_FIELDS:
            tier = TIER_FIELDS[f]
            for lineno, text in section.body:
                m = _ANNOTATION_RE.match(text)
                try:
                    theme = normalize_name(m.group("theme"))
                except ValueError as exc:
                    reader.error("BAD_ANNOTATION", str(exc), lineno, block.header)
                    return None
                if theme in seen:
                    reader.warn(
                        "DUP_ANNOTATION",
                        f"{theme!r} already annotated as {seen[theme]}; {tier} ignored",
                        lineno,
                        block.header,
                    )
                    continue
                seen[theme] = tier
                annotations.append(Annotation(theme, tier, m.group("comment")))
        elif f in ("Title", "Date", "Collection", "Description"):
            values[f.lower()] = _text(section)
            if f == "Date" and section.body and not _DATE_RE.match(values["date"]):
                reader.warn("BAD_DATE", f"date {values['date']!r} is not YYYY, YYYY-MM-DD or YYYY-YYYY",
                            section.line + 1, block.header)
        else:
            reader.warn("UNKNOWN_FIELD", f"unknown field {f!r} ignored", section.line, block.header)
    try:
        return StoryEntry(story_id=block.header, annotations=tuple(annotations), **values)
    except ValueError as exc:
        reader.error("BAD_STORY", str(exc), block.line, block.header)
        return None


def _annotation_line(a: Annotation) -> str:
    return a.theme if a.comment is None else f"{a.theme} [{a.comment}]"


def serialize_story_document(stories: Iterable[StoryEntry]) -> str:
    """Canonical text: stories sorted by id, tiers Choice/Major/Minor, themes sorted."""
    blocks = []
    for s in sorted(stories, key=lambda s: s.story_id):
        sections = [
            ("Title", _lines(s.title)),
            ("Date", _lines(s.date)),
            ("Collection", _lines(s.collection)),
            ("Description", _lines(s.description)),
        ]
        for fname, tier in TIER_FIELDS.items():
            anns = sorted((a for a in s.annotations if a.tier == tier), key=lambda a: a.theme)
            sections.append((fname, [_annotation_line(a) for a in anns]))
        blocks.append(_block_text(s.story_id, sections))
    return "\n\n\n".join(blocks) + "\n" if blocks else ""


# ---------------------------------------------------------------- corpus


def read_text(path: str | PathLike) -> str:
    return Path(path).read_bytes().decode("utf-8")


def _diag_key(d: Diagnostic):
    return (d.file or "", d.line or 0, d.code, d.theme or "", d.message)


def load_corpus(
    theme_paths: Sequence[str | PathLike],
    story_paths: Sequence[str | PathLike] = (),
) -> tuple[ThemeOntology, AnnotatedCorpus, list[Diagnostic]]:
    """Parse theme and story files and cross-check annotations.

    Annotations that name no known theme (or alias) are dropped with an
    ``UNKNOWN_THEME`` warning; aliases are replaced by theme names. Raises
    :class:`~ltokit.diagnostics.OntologyError` when the themes do not form a
    valid ontology, and ``OSError``/``UnicodeDecodeError`` on unreadable files.
    """
    diagnostics: list[Diagnostic] = []
    themes: list[Theme] = []
    for path in theme_paths:
        parsed, diags = parse_theme_document(read_text(path), str(path))
        themes.extend(parsed)
        diagnostics.extend(diags)
    ont = build_ontology(themes)

    stories: dict[str, StoryEntry] = {}
    for path in story_paths:
        parsed, diags = parse_story_document(read_text(path), str(path))
        diagnostics.extend(diags)
        for story in parsed:
            if story.story_id in stories:
                diagnostics.append(
                    Diagnostic(ERROR, "DUP_STORY", f"story {story.story_id!r} defined again; dropped",
                               story.story_id, str(path))
                )
                continue
            stories[story.story_id] = _cross_check(story, ont, diagnostics, str(path))
    return ont, AnnotatedCorpus(stories.values()), sorted(diagnostics, key=_diag_key)


def _cross_check(story: StoryEntry, ont: ThemeOntology, diagnostics: list, path: str) -> StoryEntry:
    kept: list[Annotation] = []
    seen = set()
    for a in story.annotations:
        if a.theme not in ont:
            diagnostics.append(
                Diagnostic(WARNING, "UNKNOWN_THEME", f"{a.theme!r} is not in the ontology; annotation dropped",
                           story.story_id, path)
            )
            continue
        name = ont.resolve(a.theme)
        if name in seen:
            diagnostics.append(
                Diagnostic(WARNING, "DUP_ANNOTATION", f"{a.theme!r} resolves to already annotated {name!r}",
                           story.story_id, path)
            )
            continue
        seen.add(name)
        kept.append(a._replace(theme=name))
    if kept == list(story.annotations):
        return story
    return StoryEntry(story.story_id, story.title, story.date, story.collection, story.description, tuple(kept))


# ---------------------------------------------------------------- OWL

IRI_BASE = "https://themeontology.org/lto#"
ONTOLOGY_IRI = "https://themeontology.org/lto"
BFO_GDC = "http://purl.obolibrary.org/obo/BFO_0000031"
_DEFINITION = "http://purl.obolibrary.org/obo/IAO_0000115"
_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
_ALT_LABEL = "http://www.w3.org/2004/02/skos/core#altLabel"
_SEE_ALSO = "http://www.w3.org/2000/01/rdf-schema#seeAlso"

_IRI_SAFE = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._~")


def iri_fragment(name: str) -> str:
    """Fragment for a theme name: spaces become ``-``, anything else unsafe is percent-encoded.

    A literal ``-`` is encoded as ``%2D`` so distinct names never share a fragment.
    Non-ASCII letters and digits are legal IRI characters and kept as is.
    """
    out = []
    for ch in name:
        if ch == " ":
            out.append("-")
        elif ch in _IRI_SAFE or (ord(ch) > 127 and ch.isalnum()):
            out.append(ch)
        else:
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8"))
    return "".join(out)


def _literal(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_owl(ont: ThemeOntology) -> str:
    """OWL2 functional-style document for the ontology.

    The root is declared a subclass of BFO 'generically dependent continuant'.
    Declarations and axioms are each sorted by IRI.
    """
    iri = {name: f"<{IRI_BASE}{iri_fragment(name)}>" for name in ont}
    declarations = [f"Declaration(Class(<{BFO_GDC}>))"]
    annotations = [f'AnnotationAssertion(<{_LABEL}> <{BFO_GDC}> "generically dependent continuant")']
    subclass = [f"SubClassOf({iri[ont.root]} <{BFO_GDC}>)"]
    for name in sorted(ont, key=iri.__getitem__):
        t = ont.themes[name]
        c = iri[name]
        declarations.append(f"Declaration(Class({c}))")
        annotations.append(f"AnnotationAssertion(<{_LABEL}> {c} {_literal(name)})")
        if t.definition:
            annotations.append(f"AnnotationAssertion(<{_DEFINITION}> {c} {_literal(t.definition)})")
        annotations.extend(f"AnnotationAssertion(<{_ALT_LABEL}> {c} {_literal(a)})" for a in sorted(t.aliases))
        annotations.extend(f"AnnotationAssertion(<{_SEE_ALSO}> {c} {_literal(r)})" for r in sorted(t.references))
        subclass.extend(f"SubClassOf({c} {iri[p]})" for p in t.parents)
    declarations.sort()
    annotations.sort()
    subclass.sort()
    lines = [
        "Prefix(owl:=<http://www.w3.org/2002/07/owl#>)",
        "Prefix(rdf:=<http://www.w3.org/1999/02/22-rdf-syntax-ns#>)",
        "Prefix(rdfs:=<http://www.w3.org/2000/01/rdf-schema#>)",
        "Prefix(xsd:=<http://www.w3.org/2001/XMLSchema#>)",
        "Prefix(skos:=<http://www.w3.org/2004/02/skos/core#>)",
        "Prefix(obo:=<http://purl.obolibrary.org/obo/>)",
        "",
        f"Ontology(<{ONTOLOGY_IRI}>",
        "",
        *declarations,
        "",
        *subclass,
        "",
        *annotations,
        ")",
    ]
    return "\n".join(lines) + "\n"
