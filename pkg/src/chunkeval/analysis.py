"""Boundary statistics and correlation against human judgment tables.

Boundary statistics hold each annotator out in turn, partition the sentence
from the remaining annotators' edits, and classify every held-out edit as
falling inside a changed slot (ICC), inside an unchanged chunk (IUC), or
crossing a boundary (CC).
"""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .chunker import UNCHANGED, chunk_length, partition
from .corpus import AnnotatedSample, apply_edits
from .errors import (
    DegenerateError,
    NoChunksError,
    ParseError,
    SystemMismatchError,
    TooFewAnnotatorsError,
)


@dataclass(frozen=True)
class BoundaryStats:
    """Hold-one-out containment ratios with their raw tallies."""

    icc: float
    iuc: float
    cc: float
    icc_count: int
    iuc_count: int
    cc_count: int
    edits_total: int


def _classify_edit(edit, slot_spans, unchanged_spans) -> str:
    # Closed-interval containment; slots take precedence so a point edit on
    # a slot boundary counts as in-chunk.
    s, e = edit.start, edit.end
    for a, b in slot_spans:
        if a <= s and e <= b:
            return "icc"
    for a, b in unchanged_spans:
        if a <= s and e <= b:
            return "iuc"
    return "cc"


def boundary_stats(
    samples: Sequence[AnnotatedSample], per_pass_mean: bool = False
) -> BoundaryStats:
    """Exhaustive hold-one-out boundary statistics over a reference set.

    With ``per_pass_mean`` the three ratios are averaged over hold-out
    passes instead of pooled over all held-out edits; the raw tallies are
    pooled either way.
    """
    counts = {"icc": 0, "iuc": 0, "cc": 0}
    pass_ratios: list[tuple[float, float, float]] = []
    for i, sample in enumerate(samples):
        ids = sample.annotator_ids
        if len(ids) < 2:
            raise TooFewAnnotatorsError(
                f"sample {i} has {len(ids)} annotator(s); need at least 2"
            )
        for held_out in ids:
            others = [
                (aid, sample.annotations[aid]) for aid in ids if aid != held_out
            ]
            cs = partition(sample.source, (), others)
            slot_spans = [cs.boundary_spans[k] for k in cs.changed_indices]
            changed = set(cs.changed_indices)
            unchanged_spans = [
                span
                for k, span in enumerate(cs.boundary_spans)
                if k not in changed
            ]
            local = {"icc": 0, "iuc": 0, "cc": 0}
            for edit in sample.annotations[held_out]:
                local[_classify_edit(edit, slot_spans, unchanged_spans)] += 1
            for key, value in local.items():
                counts[key] += value
            m = sum(local.values())
            if m:
                pass_ratios.append(
                    (local["icc"] / m, local["iuc"] / m, local["cc"] / m)
                )
    total = counts["icc"] + counts["iuc"] + counts["cc"]
    if total == 0:
        raise NoChunksError("no held-out edits; boundary ratios are undefined")
    if per_pass_mean:
        icc = math.fsum(r[0] for r in pass_ratios) / len(pass_ratios)
        iuc = math.fsum(r[1] for r in pass_ratios) / len(pass_ratios)
        cc = math.fsum(r[2] for r in pass_ratios) / len(pass_ratios)
    else:
        icc = counts["icc"] / total
        iuc = counts["iuc"] / total
        cc = counts["cc"] / total
    return BoundaryStats(
        icc, iuc, cc, counts["icc"], counts["iuc"], counts["cc"], total
    )


def corpus_stats(samples: Sequence[AnnotatedSample]) -> dict:
    """Reference-set statistics: sentence/reference/edit/chunk counts and lengths."""
    n_sentences = len(samples)
    src_len = [len(s.source) for s in samples]
    ref_len: list[int] = []
    edit_len: list[int] = []
    unchanged_len: list[int] = []
    changed_len: list[int] = []
    for sample in samples:
        for aid in sample.annotator_ids:
            ref_len.append(len(apply_edits(sample.source, sample.annotations[aid])))
            edit_len.extend(len(e.replacement) for e in sample.annotations[aid])
        cs = partition(
            sample.source,
            (),
            [(aid, sample.annotations[aid]) for aid in sample.annotator_ids],
        )
        for _, chunks in cs.ref_chunks:
            for chunk in chunks:
                if chunk.kind == UNCHANGED:
                    unchanged_len.append(chunk_length(chunk))
                else:
                    changed_len.append(chunk_length(chunk))

    def _mean(xs):
        return math.fsum(xs) / len(xs) if xs else 0.0

    n_chunks = len(unchanged_len) + len(changed_len)
    return {
        "sentences": n_sentences,
        "avg_sentence_length": _mean(src_len),
        "references": len(ref_len),
        "avg_reference_length": _mean(ref_len),
        "edits": len(edit_len),
        "avg_edit_length": _mean(edit_len),
        "unchanged_chunks": len(unchanged_len),
        "unchanged_chunk_share": len(unchanged_len) / n_chunks if n_chunks else 0.0,
        "avg_unchanged_chunk_length": _mean(unchanged_len),
        "changed_chunks": len(changed_len),
        "changed_chunk_share": len(changed_len) / n_chunks if n_chunks else 0.0,
        "avg_changed_chunk_length": _mean(changed_len),
    }


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 3:
        raise ValueError("need at least 3 points")
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateError("correlation undefined for a constant list")
    return sxy / math.sqrt(sxx * syy)


def _ranks(xs: Sequence[float]) -> list[float]:
    """Fractional ranks (1-based), ties averaged."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation: Pearson on average-tie ranks."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    return pearson(_ranks(xs), _ranks(ys))


@dataclass(frozen=True)
class HumanTable:
    """System id -> human score, with the ranking method used to produce it."""

    scores: dict[str, float]
    method: str = ""


def correlate(
    metric_scores: Mapping[str, float], human: HumanTable
) -> tuple[float, float]:
    """(Pearson, Spearman) of metric vs human scores aligned by system id."""
    metric_ids = set(metric_scores)
    human_ids = set(human.scores)
    if metric_ids != human_ids:
        raise SystemMismatchError(metric_ids - human_ids, human_ids - metric_ids)
    systems = sorted(metric_ids)
    xs = [metric_scores[s] for s in systems]
    ys = [human.scores[s] for s in systems]
    return pearson(xs, ys), spearman(xs, ys)


def load_human_table(text: str, method: str = "") -> HumanTable:
    """Parse a TSV of ``system<TAB>score`` rows below that exact header."""
    lines = text.splitlines()
    if not lines or [c.strip() for c in lines[0].split("\t")] != ["system", "score"]:
        raise ParseError("expected header 'system<TAB>score'", 1)
    scores: dict[str, float] = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 2:
            raise ParseError(f"expected 2 columns, got {len(cells)}", lineno)
        system = cells[0].strip()
        if system in scores:
            raise ParseError(f"duplicate system {system!r}", lineno)
        try:
            scores[system] = float(cells[1])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from exc
    return HumanTable(scores, method)


def load_metric_scores(text: str, variant: str | None = None) -> dict[str, float]:
    """Read system scores from a score report (or a plain system/score TSV).

    Report rows are keyed by their variant column; when the report holds
    several variants, ``variant`` selects one. Accuracy variants contribute
    their Acc column, the others their F_beta column.
    """
    lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
    if not lines:
        raise ParseError("empty score file", 1)
    header = [c.strip() for c in lines[0].split("\t")]
    if header == ["system", "score"]:
        return dict(load_human_table(text).scores)
    if "system" not in header or "variant" not in header:
        raise ParseError(
            "expected a score report header (with 'system' and 'variant' columns) "
            "or 'system<TAB>score'",
            1,
        )
    idx = {name: k for k, name in enumerate(header)}
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        cells = line.split("\t")
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} columns", lineno)
        rows.append({name: cells[k] for name, k in idx.items()})
    variants = sorted({r["variant"] for r in rows})
    if variant is None:
        if len(variants) > 1:
            raise ParseError(
                f"report holds several variants {variants}; pick one with --variant", 1
            )
        variant = variants[0]
    picked = [r for r in rows if r["variant"] == variant]
    if not picked:
        raise ParseError(f"variant {variant!r} not present; report has {variants}", 1)
    column = "Acc" if variant.endswith("-acc") else "F_beta"
    scores: dict[str, float] = {}
    for row in picked:
        system = row["system"]
        if system in scores:
            raise ParseError(f"duplicate system {system!r} for variant {variant!r}", 1)
        scores[system] = float(row[column])
    return scores
