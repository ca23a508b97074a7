"""Partition parallel sequences into chunks with shared boundaries.

The edit sets of the hypothesis and all references are pooled; edits whose
closed source intervals touch or overlap are merged into one changed slot.
Every sequence is then segmented into the same number of chunks: the slots
plus the unchanged stretches between them.
"""

from bisect import bisect_right
from collections.abc import Sequence
from dataclasses import dataclass

from .corpus import Edit, TokenSeq, apply_edits, check_edits

UNCHANGED = "unchanged"
CORRECTED = "corrected"
DUMMY = "dummy"


@dataclass(frozen=True)
class Chunk:
    """One chunk of one sequence.

    ``kind`` is per sequence: ``unchanged`` when the segment equals the
    source span, ``corrected`` when it differs, ``dummy`` for the empty
    placeholder at an insertion point the sequence did not use.
    """

    index: int
    src_start: int
    src_end: int
    segment: TokenSeq
    kind: str


def chunk_length(chunk: Chunk) -> int:
    """Chunk length: the larger of source-span size and segment size."""
    return max(chunk.src_end - chunk.src_start, len(chunk.segment))


@dataclass(frozen=True)
class ChunkedSample:
    """Source, hypothesis and references segmented with shared boundaries."""

    source: TokenSeq
    hyp_chunks: tuple[Chunk, ...]
    ref_chunks: tuple[tuple[int, tuple[Chunk, ...]], ...]
    boundary_spans: tuple[tuple[int, int], ...]
    changed_indices: tuple[int, ...]

    @property
    def src_chunks(self) -> tuple[Chunk, ...]:
        chunks = []
        for idx, (a, b) in enumerate(self.boundary_spans):
            seg = self.source[a:b]
            kind = DUMMY if a == b else UNCHANGED
            chunks.append(Chunk(idx, a, b, seg, kind))
        return tuple(chunks)


@dataclass(frozen=True)
class ChangedSlot:
    """Per-sequence view of one changed slot."""

    index: int
    src_start: int
    src_end: int
    hyp: Chunk
    refs: tuple[tuple[int, Chunk], ...]

    @property
    def hyp_changed(self) -> bool:
        return self.hyp.kind == CORRECTED

    def changed_refs(self) -> list[tuple[int, Chunk]]:
        return [(aid, c) for aid, c in self.refs if c.kind == CORRECTED]


def _merge_intervals(edits: Sequence[Edit]) -> list[tuple[int, int]]:
    """Merge closed intervals [start, end] that overlap or touch."""
    intervals = sorted((e.start, e.end) for e in edits)
    merged: list[tuple[int, int]] = []
    for s, e in intervals:
        if merged and s <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], e))
        else:
            merged.append((s, e))
    return merged


def _segment_sequence(
    source: TokenSeq,
    edits: tuple[Edit, ...],
    spans: list[tuple[int, int]],
    slot_flags: list[bool],
) -> tuple[Chunk, ...]:
    slot_starts = [a for (a, _), is_slot in zip(spans, slot_flags) if is_slot]
    slot_positions = [i for i, is_slot in enumerate(slot_flags) if is_slot]
    by_slot: dict[int, list[Edit]] = {}
    for e in edits:
        k = bisect_right(slot_starts, e.start) - 1
        idx = slot_positions[k]
        a, b = spans[idx]
        if not (a <= e.start and e.end <= b):
            raise AssertionError("edit escaped its merged slot")
        by_slot.setdefault(idx, []).append(e)

    chunks: list[Chunk] = []
    for idx, ((a, b), is_slot) in enumerate(zip(spans, slot_flags)):
        src_seg = source[a:b]
        if not is_slot:
            chunks.append(Chunk(idx, a, b, src_seg, UNCHANGED))
            continue
        local = [
            Edit(e.start - a, e.end - a, e.replacement, e.type_label, e.annotator_id)
            for e in by_slot.get(idx, [])
        ]
        segment = apply_edits(src_seg, local)
        if a == b:
            kind = CORRECTED if segment else DUMMY
        else:
            kind = UNCHANGED if segment == src_seg else CORRECTED
        chunks.append(Chunk(idx, a, b, segment, kind))
    return tuple(chunks)


def partition(
    source: Sequence[str],
    hyp_edits: Sequence[Edit],
    ref_edit_sets: Sequence[tuple[int, Sequence[Edit]]],
) -> ChunkedSample:
    """Segment source, hypothesis and references into aligned chunks."""
    source = tuple(source)
    n = len(source)
    hyp = check_edits(hyp_edits, n)
    refs = [(aid, check_edits(edits, n)) for aid, edits in ref_edit_sets]

    pooled = list(hyp)
    for _, edits in refs:
        pooled.extend(edits)
    slots = _merge_intervals(pooled)

    spans: list[tuple[int, int]] = []
    slot_flags: list[bool] = []
    pos = 0
    for a, b in slots:
        if a > pos:
            spans.append((pos, a))
            slot_flags.append(False)
        spans.append((a, b))
        slot_flags.append(True)
        pos = b
    if pos < n or not spans:
        spans.append((pos, n))
        slot_flags.append(False)

    hyp_chunks = _segment_sequence(source, hyp, spans, slot_flags)
    ref_chunks = tuple(
        (aid, _segment_sequence(source, edits, spans, slot_flags))
        for aid, edits in refs
    )
    changed = tuple(i for i, is_slot in enumerate(slot_flags) if is_slot)
    return ChunkedSample(source, hyp_chunks, ref_chunks, tuple(spans), changed)


def changed_slots(cs: ChunkedSample) -> list[ChangedSlot]:
    """One slot per changed chunk index, with per-sequence chunks."""
    out = []
    for idx in cs.changed_indices:
        a, b = cs.boundary_spans[idx]
        refs = tuple((aid, chunks[idx]) for aid, chunks in cs.ref_chunks)
        out.append(ChangedSlot(idx, a, b, cs.hyp_chunks[idx], refs))
    return out


def chunk_table(cs: ChunkedSample, only_changed: bool = False) -> list[list[str]]:
    """Rows (header + one per sequence) with one column per chunk.

    Header cells of changed slots carry a ``*`` marker; cell text is the
    space-joined segment, so dummy cells come out empty and concatenating a
    row reproduces that sequence.
    """
    changed = set(cs.changed_indices)
    columns = [
        i for i in range(len(cs.boundary_spans)) if not only_changed or i in changed
    ]
    header = ["sequence"] + [
        f"chunk-{i + 1}" + (" *" if i in changed else "") for i in columns
    ]
    rows = [header]
    src_chunks = cs.src_chunks
    rows.append(["source"] + [" ".join(src_chunks[i].segment) for i in columns])
    rows.append(["hypothesis"] + [" ".join(cs.hyp_chunks[i].segment) for i in columns])
    for aid, chunks in cs.ref_chunks:
        rows.append([f"ref-{aid}"] + [" ".join(chunks[i].segment) for i in columns])
    return rows
