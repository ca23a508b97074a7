"""Corpus I/O: tokenization, edits, M2 annotation files and parallel text.

The M2 interchange format is parsed and emitted bit-exactly: records are
blank-line separated, each holding one ``S`` source line and any number of
``A`` edit lines of the form::

    A <start> <end>|||<type>|||<replacement or -NONE->|||REQUIRED|||-NONE-|||<annotator>

``A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||<id>`` declares an annotator
with no edits.
"""

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import (
    BoundsError,
    EmptySourceError,
    LengthMismatchError,
    OverlapError,
    ParseError,
)

# A token sequence is a plain tuple of whitespace-free tokens.
TokenSeq = tuple[str, ...]

_ASCII_WS = re.compile(r"[ \t\r\n\f\v]+")

NOOP_TYPE = "noop"
UNKNOWN_TYPE = "UNK"
_NONE_FIELD = "-NONE-"


def tokenize(text: str) -> TokenSeq:
    """Split on runs of ASCII whitespace; empty input gives an empty tuple."""
    return tuple(t for t in _ASCII_WS.split(text) if t)


@dataclass(frozen=True)
class Edit:
    """Replacement of the source span [start, end) by ``replacement``.

    ``start == end`` denotes a pure insertion at that position and requires a
    non-empty replacement; a deletion has an empty replacement over a
    non-empty span. A no-op is never represented as an Edit.
    """

    start: int
    end: int
    replacement: tuple[str, ...]
    type_label: str | None = None
    annotator_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "replacement", tuple(self.replacement))
        if self.start < 0 or self.end < self.start:
            raise BoundsError(f"bad edit interval [{self.start}, {self.end})")
        if self.start == self.end and not self.replacement:
            raise ValueError("empty edit: insertion must have a replacement")
        if self.annotator_id < 0:
            raise ValueError(f"negative annotator id {self.annotator_id}")


def check_edits(edits: Sequence[Edit], source_len: int) -> tuple[Edit, ...]:
    """Sort edits by (start, end) and verify bounds and non-overlap."""
    ordered = tuple(sorted(edits, key=lambda e: (e.start, e.end)))
    for e in ordered:
        if e.end > source_len:
            raise BoundsError(
                f"edit [{e.start}, {e.end}) exceeds source length {source_len}"
            )
    for a, b in zip(ordered, ordered[1:]):
        if a.end > b.start:
            raise OverlapError(
                f"edits [{a.start}, {a.end}) and [{b.start}, {b.end}) overlap"
            )
        if a.start == a.end == b.start == b.end:
            raise OverlapError(f"two insertions at position {a.start}")
    return ordered


@dataclass(frozen=True)
class AnnotatedSample:
    """One source sentence with per-annotator edit lists."""

    source: TokenSeq
    annotations: dict[int, tuple[Edit, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        checked = {
            aid: check_edits(edits, len(self.source))
            for aid, edits in self.annotations.items()
        }
        object.__setattr__(self, "annotations", checked)

    @property
    def annotator_ids(self) -> list[int]:
        return sorted(self.annotations)

    def reference(self, annotator_id: int) -> TokenSeq:
        """The corrected sentence of one annotator."""
        return apply_edits(self.source, self.annotations[annotator_id])


def apply_edits(source: Sequence[str], edits: Iterable[Edit]) -> TokenSeq:
    """Replace each edit span by its replacement, left to right."""
    ordered = check_edits(list(edits), len(source))
    out: list[str] = []
    pos = 0
    for e in ordered:
        out.extend(source[pos : e.start])
        out.extend(e.replacement)
        pos = e.end
    out.extend(source[pos:])
    return tuple(out)


def parse_m2(text: str) -> list[AnnotatedSample]:
    """Parse an M2 file into one AnnotatedSample per ``S`` block."""
    samples: list[AnnotatedSample] = []
    source: TokenSeq | None = None
    block_line = 0
    edits: dict[int, list[Edit]] = {}
    noop_ids: set[int] = set()

    def flush():
        nonlocal source, edits, noop_ids
        if source is None:
            return
        for aid in noop_ids:
            if edits.get(aid):
                raise ParseError(
                    f"annotator {aid} has both a noop record and edits", block_line
                )
            edits.setdefault(aid, [])
        annotations = {aid: tuple(es) for aid, es in edits.items()}
        try:
            samples.append(AnnotatedSample(source, annotations))
        except BoundsError as exc:
            raise ParseError(str(exc), block_line) from exc
        source, edits, noop_ids = None, {}, set()

    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("S ") or line == "S":
            if source is not None:
                raise ParseError("second 'S' line inside one record", lineno)
            source = tokenize(line[2:])
            block_line = lineno
            if not source:
                raise ParseError("empty source sentence", lineno)
        elif line.startswith("A "):
            if source is None:
                raise ParseError("'A' line before any 'S' line", lineno)
            _parse_a_line(line, lineno, len(source), edits, noop_ids)
        else:
            raise ParseError(f"unrecognized line: {line[:40]!r}", lineno)
    flush()
    return samples


def _parse_a_line(
    line: str,
    lineno: int,
    source_len: int,
    edits: dict[int, list[Edit]],
    noop_ids: set[int],
) -> None:
    fields = line[2:].split("|||")
    if len(fields) < 6:
        raise ParseError(f"expected 6 '|||' fields, got {len(fields)}", lineno)
    span = fields[0].split()
    if len(span) != 2:
        raise ParseError(f"bad span field {fields[0]!r}", lineno)
    try:
        start, end = int(span[0]), int(span[1])
        annotator = int(fields[5])
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from exc
    if annotator < 0:
        raise ParseError(f"negative annotator id {annotator}", lineno)
    type_label = fields[1]
    if type_label == NOOP_TYPE:
        if (start, end) != (-1, -1):
            raise ParseError("noop record must use span -1 -1", lineno)
        noop_ids.add(annotator)
        return
    if start == -1 or end == -1:
        raise ParseError("span -1 -1 is reserved for noop records", lineno)
    if not 0 <= start <= end <= source_len:
        raise ParseError(
            f"edit [{start}, {end}) outside source of length {source_len}", lineno
        )
    # a literally empty replacement field is tolerated as a deletion
    replacement = () if fields[2] == _NONE_FIELD else tokenize(fields[2])
    if start == end and not replacement:
        raise ParseError("insertion with empty replacement", lineno)
    edits.setdefault(annotator, []).append(
        Edit(start, end, replacement, type_label, annotator)
    )


def emit_m2(samples: Iterable[AnnotatedSample]) -> str:
    """Serialize samples canonically: annotators ascending, edits sorted."""
    blocks: list[str] = []
    for sample in samples:
        lines = ["S " + " ".join(sample.source)]
        for aid in sample.annotator_ids:
            annots = sample.annotations[aid]
            if not annots:
                lines.append(
                    f"A -1 -1|||{NOOP_TYPE}|||{_NONE_FIELD}|||REQUIRED|||{_NONE_FIELD}|||{aid}"
                )
                continue
            for e in annots:
                repl = " ".join(e.replacement) if e.replacement else _NONE_FIELD
                label = e.type_label if e.type_label is not None else UNKNOWN_TYPE
                lines.append(
                    f"A {e.start} {e.end}|||{label}|||{repl}|||REQUIRED|||{_NONE_FIELD}|||{aid}"
                )
        blocks.append("\n".join(lines))
    return "".join(block + "\n\n" for block in blocks)


def load_parallel(src_text: str, tgt_text: str) -> list[tuple[TokenSeq, TokenSeq]]:
    """Pair up the i-th source and target lines, tokenized."""
    src_lines = src_text.splitlines()
    tgt_lines = tgt_text.splitlines()
    if len(src_lines) != len(tgt_lines):
        raise LengthMismatchError(
            f"source has {len(src_lines)} lines, target has {len(tgt_lines)}"
        )
    pairs = []
    for i, (s, t) in enumerate(zip(src_lines, tgt_lines), 1):
        src = tokenize(s)
        if not src:
            raise EmptySourceError(f"source line {i} is empty")
        pairs.append((src, tokenize(t)))
    return pairs


def drop_unchanged_references(sample: AnnotatedSample) -> AnnotatedSample | None:
    """Remove annotators whose correction equals the source (zero edits).

    Returns None when no annotator remains; callers decide how to handle
    such samples.
    """
    kept = {aid: es for aid, es in sample.annotations.items() if es}
    if not kept:
        return None
    return AnnotatedSample(sample.source, kept)
