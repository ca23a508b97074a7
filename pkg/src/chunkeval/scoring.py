"""Length-weighted chunk scoring under dependence and independence.

Per changed slot, a hypothesis chunk is a TP when it matches the reference
(the selected one under dependence, any one under independence), an FP when
it changes the slot without a match, an FN when a required change was not
made, and a TN when keeping the source agrees with the reference side.
Weights follow clipped logistic curves of the chunk length around the
dataset's average changed-chunk length.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

from .chunker import (
    CORRECTED,
    ChangedSlot,
    ChunkedSample,
    changed_slots,
    chunk_length,
)
from .errors import NoChunksError

FN_BOTH = "both"
FN_FP_ONLY = "fp-only"
FN_MODES = (FN_BOTH, FN_FP_ONLY)

VARIANTS = (
    "dep",
    "indep",
    "sent-dep",
    "sent-indep",
    "dep-acc",
    "indep-acc",
    "sent-dep-acc",
    "sent-indep-acc",
)


@dataclass(frozen=True)
class WeightConfig:
    """Scale factors and clip bounds for the length-weight curves.

    All curves pass through weight 1.0 at ``x == ell`` before clipping.
    TN weights are pinned to 1 by their (1, 1) clip; ``alpha_tn`` is
    reserved and unused.
    """

    alpha_tp: float = 2.0
    alpha_fp: float = 2.0
    alpha_fn: float = 2.0
    alpha_tn: float | None = None
    clip_tp: tuple[float, float] = (0.75, 1.25)
    clip_fp: tuple[float, float] = (0.75, 1.25)
    clip_fn: tuple[float, float] = (0.75, 1.25)
    clip_tn: tuple[float, float] = (1.0, 1.0)
    ell: float = 1.0
    beta: float = 0.5

    def __post_init__(self):
        for name in ("alpha_tp", "alpha_fp", "alpha_fn"):
            if getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be > 1")
        for name in ("clip_tp", "clip_fp", "clip_fn", "clip_tn"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must satisfy 0 < min <= max")
        if self.ell <= 0:
            raise ValueError("ell must be > 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")


# Default hyperparameters per variant; corpus variants share one profile,
# sentence-level variants another (their FN clip pins FN weights to 1).
_CORPUS_PROFILE = WeightConfig()
_SENT_DEP_PROFILE = WeightConfig(
    alpha_tp=10.0,
    alpha_fp=10.0,
    alpha_fn=10.0,
    clip_tp=(1.0, 10.0),
    clip_fp=(0.25, 10.0),
    clip_fn=(1.0, 1.0),
)
_SENT_INDEP_PROFILE = replace(
    _SENT_DEP_PROFILE, clip_tp=(2.5, 10.0), clip_fp=(0.25, 1.0)
)


def parse_variant(variant: str) -> tuple[str, str, bool]:
    """Split a variant name into (assumption, level, report_accuracy)."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    acc = variant.endswith("-acc")
    body = variant[:-4] if acc else variant
    level = "sentence" if body.startswith("sent-") else "corpus"
    assumption = body.removeprefix("sent-")
    return assumption, level, acc


def default_config(variant: str) -> WeightConfig:
    """The stock weight profile for one scorer variant."""
    assumption, level, _ = parse_variant(variant)
    if level == "corpus":
        return _CORPUS_PROFILE
    return _SENT_DEP_PROFILE if assumption == "dep" else _SENT_INDEP_PROFILE


def unweighted(cfg: WeightConfig) -> WeightConfig:
    """Pin every weight to 1, reducing scores to raw counts."""
    one = (1.0, 1.0)
    return replace(cfg, clip_tp=one, clip_fp=one, clip_fn=one, clip_tn=one)


def _clip(value: float, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return min(max(value, lo), hi)


def _exp(z: float) -> float:
    return math.exp(min(z, 700.0))


def raw_weight(x: float, alpha: float, ell: float, outcome: str) -> float:
    """Pre-clip logistic weight; TP/FN rise with x, FP falls, TN is 1."""
    if outcome in ("tp", "fn"):
        return alpha / (1.0 + (alpha - 1.0) * _exp(ell - x))
    if outcome == "fp":
        return alpha / (1.0 + (alpha - 1.0) * _exp(x - ell))
    if outcome == "tn":
        return 1.0
    raise ValueError(f"unknown outcome {outcome!r}")


def length_weight(x: float, cfg: WeightConfig, outcome: str) -> float:
    """Clipped length weight of a chunk of length x for one outcome."""
    alpha = {
        "tp": cfg.alpha_tp,
        "fp": cfg.alpha_fp,
        "fn": cfg.alpha_fn,
        "tn": 1.5,  # irrelevant: raw TN weight is constant 1
    }[outcome]
    bounds = {
        "tp": cfg.clip_tp,
        "fp": cfg.clip_fp,
        "fn": cfg.clip_fn,
        "tn": cfg.clip_tn,
    }[outcome]
    return _clip(raw_weight(x, alpha, cfg.ell, outcome), bounds)


def compute_ell(dataset: Sequence[ChunkedSample]) -> float:
    """Average chunk length over all reference chunks that change the source."""
    lengths = [
        chunk_length(chunks[idx])
        for cs in dataset
        for _, chunks in cs.ref_chunks
        for idx in cs.changed_indices
        if chunks[idx].kind == CORRECTED
    ]
    if not lengths:
        raise NoChunksError("no reference changed any chunk; ell is undefined")
    return math.fsum(lengths) / len(lengths)


@dataclass
class OutcomeCounts:
    """Weighted and raw TP/FP/FN/TN accumulators for one or more sentences."""

    tp_w: float = 0.0
    fp_w: float = 0.0
    fn_w: float = 0.0
    tn_w: float = 0.0
    tp_n: int = 0
    fp_n: int = 0
    fn_n: int = 0
    tn_n: int = 0

    def add(self, outcome: str, weight: float) -> None:
        setattr(self, outcome + "_w", getattr(self, outcome + "_w") + weight)
        setattr(self, outcome + "_n", getattr(self, outcome + "_n") + 1)


def sum_counts(per_sentence: Sequence[OutcomeCounts]) -> OutcomeCounts:
    """Order-independent exact reduction of per-sentence counts."""
    return OutcomeCounts(
        tp_w=math.fsum(c.tp_w for c in per_sentence),
        fp_w=math.fsum(c.fp_w for c in per_sentence),
        fn_w=math.fsum(c.fn_w for c in per_sentence),
        tn_w=math.fsum(c.tn_w for c in per_sentence),
        tp_n=sum(c.tp_n for c in per_sentence),
        fp_n=sum(c.fp_n for c in per_sentence),
        fn_n=sum(c.fn_n for c in per_sentence),
        tn_n=sum(c.tn_n for c in per_sentence),
    )


def precision_recall(counts: OutcomeCounts) -> tuple[float, float]:
    """Weighted precision and recall; empty denominators count as 1.0."""
    p = counts.tp_w / (counts.tp_w + counts.fp_w) if counts.tp_w + counts.fp_w > 0 else 1.0
    r = counts.tp_w / (counts.tp_w + counts.fn_w) if counts.tp_w + counts.fn_w > 0 else 1.0
    return p, r


def f_beta_formula(p: float, r: float, beta: float = 0.5) -> float:
    """F_beta from precision and recall; 0 when the numerator is 0."""
    num = (1.0 + beta * beta) * p * r
    if num == 0.0:
        return 0.0
    return num / (beta * beta * p + r)


def accuracy(counts: OutcomeCounts) -> float:
    """(TP + TN) / all outcomes; 1.0 on an empty denominator."""
    den = counts.tp_w + counts.fp_w + counts.fn_w + counts.tn_w
    if den == 0.0:
        return 1.0
    return (counts.tp_w + counts.tn_w) / den


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    f_beta: float
    accuracy: float

    @classmethod
    def from_counts(cls, counts: OutcomeCounts, beta: float = 0.5) -> "Scores":
        p, r = precision_recall(counts)
        return cls(p, r, f_beta_formula(p, r, beta), accuracy(counts))


def _tn_weight(cfg: WeightConfig) -> float:
    return _clip(1.0, cfg.clip_tn)


def _min_changed_length(slot: ChangedSlot) -> int:
    return min(chunk_length(c) for _, c in slot.changed_refs())


def _score_slot_vs_ref(
    counts: OutcomeCounts,
    slot: ChangedSlot,
    ref_chunk,
    cfg: WeightConfig,
    fn_on_mismatch: str,
) -> None:
    hyp = slot.hyp
    ref_changed = ref_chunk.kind == CORRECTED
    if hyp.kind == CORRECTED:
        if hyp.segment == ref_chunk.segment:
            counts.add("tp", length_weight(chunk_length(hyp), cfg, "tp"))
        else:
            counts.add("fp", length_weight(chunk_length(hyp), cfg, "fp"))
            if ref_changed and fn_on_mismatch == FN_BOTH:
                counts.add("fn", length_weight(chunk_length(ref_chunk), cfg, "fn"))
    elif ref_changed:
        counts.add("fn", length_weight(chunk_length(ref_chunk), cfg, "fn"))
    else:
        counts.add("tn", _tn_weight(cfg))


def score_sentence_dependent(
    cs: ChunkedSample, cfg: WeightConfig, fn_on_mismatch: str = FN_FP_ONLY
) -> tuple[OutcomeCounts, int | None]:
    """Score against each reference separately and keep the best one.

    The selected reference maximizes the sentence F_beta; ties prefer the
    higher weighted TP, then the lower annotator id. Returns the winning
    counts and annotator id (None for a sample without references, which is
    scored as if against an edit-free reference).
    """
    slots = changed_slots(cs)
    n_unchanged = len(cs.boundary_spans) - len(slots)
    tn_w = _tn_weight(cfg)

    candidates: list[tuple[int | None, OutcomeCounts]] = []
    if not cs.ref_chunks:
        counts = OutcomeCounts()
        for slot in slots:
            if slot.hyp.kind == CORRECTED:
                counts.add("fp", length_weight(chunk_length(slot.hyp), cfg, "fp"))
            else:
                counts.add("tn", tn_w)
        candidates.append((None, counts))
    for aid, chunks in cs.ref_chunks:
        counts = OutcomeCounts()
        for slot in slots:
            _score_slot_vs_ref(counts, slot, chunks[slot.index], cfg, fn_on_mismatch)
        candidates.append((aid, counts))

    best_aid, best_counts, best_key = None, None, None
    for aid, counts in candidates:
        counts.tn_w += n_unchanged * tn_w
        counts.tn_n += n_unchanged
        f = f_beta_formula(*precision_recall(counts), cfg.beta)
        key = (f, counts.tp_w, -(aid if aid is not None else 0))
        if best_key is None or key > best_key:
            best_aid, best_counts, best_key = aid, counts, key
    assert best_counts is not None
    return best_counts, best_aid


def score_sentence_independent(
    cs: ChunkedSample, cfg: WeightConfig, fn_on_mismatch: str = FN_FP_ONLY
) -> OutcomeCounts:
    """Score each changed slot against all references at once.

    A changed hypothesis chunk is a TP when it matches any reference's chunk
    at that slot; a kept chunk is a TN unless every reference changed the
    slot, in which case keeping the source matches no reference and counts
    as an FN.
    """
    counts = OutcomeCounts()
    tn_w = _tn_weight(cfg)
    slots = changed_slots(cs)
    for slot in slots:
        hyp = slot.hyp
        changed = slot.changed_refs()
        if hyp.kind == CORRECTED:
            if any(c.segment == hyp.segment for _, c in slot.refs):
                counts.add("tp", length_weight(chunk_length(hyp), cfg, "tp"))
            else:
                counts.add("fp", length_weight(chunk_length(hyp), cfg, "fp"))
                if changed and fn_on_mismatch == FN_BOTH:
                    counts.add(
                        "fn", length_weight(_min_changed_length(slot), cfg, "fn")
                    )
        elif slot.refs and len(changed) == len(slot.refs):
            counts.add("fn", length_weight(_min_changed_length(slot), cfg, "fn"))
        else:
            counts.add("tn", tn_w)
    n_unchanged = len(cs.boundary_spans) - len(slots)
    counts.tn_w += n_unchanged * tn_w
    counts.tn_n += n_unchanged
    return counts


def aggregate_corpus(
    per_sentence: Sequence[OutcomeCounts], beta: float = 0.5
) -> Scores:
    """Sum counts over the dataset, then derive P/R/F_beta/accuracy."""
    return Scores.from_counts(sum_counts(per_sentence), beta)


def aggregate_sentence(per_sentence: Sequence[Scores]) -> Scores:
    """Arithmetic mean of per-sentence scores (F is averaged, not recomputed)."""
    n = len(per_sentence)
    return Scores(
        precision=math.fsum(s.precision for s in per_sentence) / n,
        recall=math.fsum(s.recall for s in per_sentence) / n,
        f_beta=math.fsum(s.f_beta for s in per_sentence) / n,
        accuracy=math.fsum(s.accuracy for s in per_sentence) / n,
    )


@dataclass(frozen=True)
class VariantResult:
    """Everything one scorer variant reports for one system."""

    variant: str
    counts: OutcomeCounts
    scores: Scores
    chosen_refs: tuple[int | None, ...] = field(default=())

    def as_row(self, system: str) -> dict:
        c, s = self.counts, self.scores
        return {
            "system": system,
            "tp_w": round(c.tp_w, 2),
            "fp_w": round(c.fp_w, 2),
            "fn_w": round(c.fn_w, 2),
            "tn_w": round(c.tn_w, 2),
            "tp_n": c.tp_n,
            "fp_n": c.fp_n,
            "fn_n": c.fn_n,
            "tn_n": c.tn_n,
            "P": round(s.precision, 4),
            "R": round(s.recall, 4),
            "F_beta": round(s.f_beta, 4),
            "Acc": round(s.accuracy, 4),
            "variant": self.variant,
        }


def run_variant(
    chunked: Sequence[ChunkedSample],
    variant: str,
    cfg: WeightConfig,
    fn_on_mismatch: str = FN_FP_ONLY,
) -> VariantResult:
    """Score a dataset under one variant with a fully resolved config."""
    assumption, level, _ = parse_variant(variant)
    per_sentence: list[OutcomeCounts] = []
    chosen: list[int | None] = []
    for cs in chunked:
        if assumption == "dep":
            counts, aid = score_sentence_dependent(cs, cfg, fn_on_mismatch)
            chosen.append(aid)
        else:
            counts = score_sentence_independent(cs, cfg, fn_on_mismatch)
        per_sentence.append(counts)
    totals = sum_counts(per_sentence)
    if level == "corpus":
        scores = Scores.from_counts(totals, cfg.beta)
    else:
        scores = aggregate_sentence(
            [Scores.from_counts(c, cfg.beta) for c in per_sentence]
        )
    return VariantResult(variant, totals, scores, tuple(chosen))
