"""Command-line interface: extract, evaluate, chunks, stats, correlate.

Exit codes: 0 success, 2 usage error, 3 data error. Diagnostics go to
stderr, data to stdout (or to the file given with -o).
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .align import extract_edits
from .analysis import (
    boundary_stats,
    correlate,
    corpus_stats,
    load_human_table,
    load_metric_scores,
)
from .chunker import chunk_table, partition
from .corpus import (
    AnnotatedSample,
    drop_unchanged_references,
    emit_m2,
    load_parallel,
    parse_m2,
    tokenize,
)
from .errors import DataError, LengthMismatchError, NoChunksError
from .scoring import (
    FN_FP_ONLY,
    FN_MODES,
    VARIANTS,
    compute_ell,
    default_config,
    run_variant,
    unweighted,
)

REPORT_COLUMNS = (
    "system",
    "tp_w",
    "fp_w",
    "fn_w",
    "tn_w",
    "tp_n",
    "fp_n",
    "fn_n",
    "tn_n",
    "P",
    "R",
    "F_beta",
    "Acc",
    "variant",
)


def _clip_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'min,max', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not 0 < lo <= hi:
        raise argparse.ArgumentTypeError("clip bounds must satisfy 0 < min <= max")
    return lo, hi


def _shared_flags() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--config",
        metavar="FILE",
        help="key=value file mirroring these flags; explicit flags win",
    )
    shared.add_argument(
        "--variant",
        action="append",
        choices=VARIANTS,
        help="scorer variant (repeatable; default: dep)",
    )
    shared.add_argument("--alpha-tp", type=float, help="TP scale factor override")
    shared.add_argument("--alpha-fp", type=float, help="FP scale factor override")
    shared.add_argument("--alpha-fn", type=float, help="FN scale factor override")
    shared.add_argument("--clip-tp", type=_clip_pair, metavar="MIN,MAX")
    shared.add_argument("--clip-fp", type=_clip_pair, metavar="MIN,MAX")
    shared.add_argument("--clip-fn", type=_clip_pair, metavar="MIN,MAX")
    shared.add_argument(
        "--ell", type=float, help="average chunk length (default: computed)"
    )
    shared.add_argument("--beta", type=float, help="F-score beta (default: 0.5)")
    shared.add_argument(
        "--fn-on-mismatch",
        choices=FN_MODES,
        default=FN_FP_ONLY,
        help="count a changed-but-wrong chunk as FP only (default) or as FP and FN",
    )
    shared.add_argument(
        "--drop-unchanged-refs",
        action="store_true",
        help="drop annotators whose correction equals the source",
    )
    shared.add_argument(
        "--format",
        choices=("tsv", "json", "text"),
        default="tsv",
        help="output format (text applies to 'chunks' only)",
    )
    shared.add_argument(
        "--only-changed",
        action="store_true",
        help="chunks: emit changed columns only",
    )
    shared.add_argument(
        "--per-pass-mean",
        action="store_true",
        help="stats: average ratios per hold-out pass instead of pooling",
    )
    shared.add_argument("-o", "--out", metavar="FILE", help="write output here")
    return shared


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    shared = _shared_flags()
    parser = argparse.ArgumentParser(
        prog="chunkeval",
        description=(
            "Chunk-level multi-reference evaluation of grammatical error "
            "correction systems."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, argparse.ArgumentParser] = {}

    p = commands["extract"] = sub.add_parser(
        "extract",
        parents=[shared],
        help="extract edits from parallel text into an M2 file",
    )
    p.add_argument("src", help="source sentences, one per line")
    p.add_argument("tgt", help="corrected sentences, one per line")

    p = commands["evaluate"] = sub.add_parser(
        "evaluate",
        parents=[shared],
        help="score a hypothesis file against a reference M2 file",
    )
    p.add_argument("hyp", help="hypothesis file (plain text or M2)")
    p.add_argument("ref", help="reference M2 file")
    p.add_argument(
        "--hyp-format",
        choices=("text", "m2"),
        default="text",
        help="hypothesis file format (default: text, one sentence per line)",
    )
    p.add_argument("--system", help="system name for the report (default: hyp stem)")

    p = commands["chunks"] = sub.add_parser(
        "chunks",
        parents=[shared],
        help="dump the chunk partition tables",
    )
    p.add_argument("hyp", help="hypothesis file (plain text or M2)")
    p.add_argument("ref", help="reference M2 file")
    p.add_argument(
        "--hyp-format", choices=("text", "m2"), default="text", help="hypothesis format"
    )

    p = commands["stats"] = sub.add_parser(
        "stats",
        parents=[shared],
        help="boundary statistics of a multi-annotator M2 file",
    )
    p.add_argument("ref", help="reference M2 file with >= 2 annotators per sentence")

    p = commands["correlate"] = sub.add_parser(
        "correlate",
        parents=[shared],
        help="correlate a metric score report with a human score table",
    )
    p.add_argument("scores", help="metric score report (or system<TAB>score TSV)")
    p.add_argument("human", help="human table: TSV with header system<TAB>score")
    return parser, commands


# --- config file -----------------------------------------------------------

_LIST_KEYS = {"variant"}
_BOOL_KEYS = {"drop_unchanged_refs", "only_changed", "per_pass_mean"}
_FLOAT_KEYS = {"alpha_tp", "alpha_fp", "alpha_fn", "ell", "beta"}
_PAIR_KEYS = {"clip_tp", "clip_fp", "clip_fn"}


def _load_config_file(path: str) -> dict:
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        try:
            if key in _LIST_KEYS:
                values[key] = [v.strip() for v in value.split(",") if v.strip()]
            elif key in _BOOL_KEYS:
                values[key] = value.lower() in ("1", "true", "yes", "on")
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _PAIR_KEYS:
                values[key] = _clip_pair(value)
            else:
                values[key] = value
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
    return values


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser, commands = build_parser()
    # First pass finds --config so its values become defaults; explicit
    # flags then override them in the real parse. Defaults must land on
    # the subcommand's parser: subparsers parse into a fresh namespace,
    # so defaults set on the top-level parser would be shadowed.
    probe, _ = parser.parse_known_args(argv)
    if getattr(probe, "config", None):
        config = _load_config_file(probe.config)
        unknown = set(config) - set(vars(probe))
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        variants = config.pop("variant", None)
        if variants:
            for v in variants:
                if v not in VARIANTS:
                    raise DataError(f"unknown variant {v!r} in config file")
        commands[probe.command].set_defaults(**config)
        args = parser.parse_args(argv)
        if args.variant is None and variants:
            args.variant = variants
        return args
    return parser.parse_args(argv)


# --- helpers ---------------------------------------------------------------


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_out(args: argparse.Namespace, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _warn(message: str) -> None:
    print(f"chunkeval: {message}", file=sys.stderr)


def _check_format(args, supported: tuple[str, ...]) -> int | None:
    if args.format not in supported:
        _warn(
            f"{args.command} supports --format {{{','.join(supported)}}}, "
            f"not {args.format!r}"
        )
        return 2
    return None


def _load_hypotheses(args, samples: list[AnnotatedSample]) -> list[list]:
    """Per-sample hypothesis edit lists, from plain text or an M2 file."""
    if args.hyp_format == "m2":
        hyp_samples = parse_m2(_read(args.hyp))
        if len(hyp_samples) != len(samples):
            raise LengthMismatchError(
                f"hypothesis M2 has {len(hyp_samples)} samples, "
                f"references have {len(samples)}"
            )
        edits = []
        for i, (h, r) in enumerate(zip(hyp_samples, samples)):
            if h.source != r.source:
                raise DataError(
                    f"sample {i + 1}: hypothesis and reference sources differ"
                )
            ids = h.annotator_ids
            if len(ids) > 1:
                _warn(
                    f"sample {i + 1}: hypothesis M2 has {len(ids)} annotators; "
                    f"using annotator {ids[0]}"
                )
            edits.append(list(h.annotations[ids[0]]) if ids else [])
        return edits
    lines = _read(args.hyp).splitlines()
    if len(lines) != len(samples):
        raise LengthMismatchError(
            f"hypothesis has {len(lines)} lines, references have {len(samples)} samples"
        )
    return [
        extract_edits(sample.source, tokenize(line))
        for sample, line in zip(samples, lines)
    ]


def _apply_drop_unchanged(
    samples: list[AnnotatedSample], hyp_edits: list[list] | None
) -> tuple[list[AnnotatedSample], list[list] | None]:
    kept_samples, kept_hyp = [], []
    skipped = 0
    for i, sample in enumerate(samples):
        filtered = drop_unchanged_references(sample)
        if filtered is None:
            skipped += 1
            continue
        kept_samples.append(filtered)
        if hyp_edits is not None:
            kept_hyp.append(hyp_edits[i])
    if skipped:
        _warn(
            f"--drop-unchanged-refs removed every annotator of {skipped} sample(s); "
            "those samples were skipped"
        )
    return kept_samples, (kept_hyp if hyp_edits is not None else None)


def _chunked_dataset(samples, hyp_edits):
    return [
        partition(
            sample.source,
            edits,
            [(aid, sample.annotations[aid]) for aid in sample.annotator_ids],
        )
        for sample, edits in zip(samples, hyp_edits)
    ]


def _resolve_configs(args, chunked):
    """Per-variant weight configs with ell and flag overrides resolved."""
    variants = list(dict.fromkeys(args.variant or ["dep"]))
    meta = {
        "fn_on_mismatch": args.fn_on_mismatch,
        "dependent_selection": "best reference per sentence",
    }
    pinned = False
    if args.ell is not None:
        ell = args.ell
    else:
        try:
            ell = compute_ell(chunked)
        except NoChunksError as exc:
            _warn(f"{exc}; falling back to unweighted counts")
            ell, pinned = 1.0, True
    meta["ell"] = round(ell, 4)
    configs = {}
    for variant in variants:
        cfg = replace(default_config(variant), ell=ell)
        for name in ("alpha_tp", "alpha_fp", "alpha_fn", "clip_tp", "clip_fp", "clip_fn", "beta"):
            value = getattr(args, name)
            if value is not None:
                cfg = replace(cfg, **{name: value})
        if pinned:
            cfg = unweighted(cfg)
        configs[variant] = cfg
    return configs, meta


def _format_report(rows: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n"
    lines = [f"# {key}: {value}" for key, value in meta.items()]
    lines.append("\t".join(REPORT_COLUMNS))
    for row in rows:
        lines.append("\t".join(str(row[c]) for c in REPORT_COLUMNS))
    return "\n".join(lines) + "\n"


def _format_tables(tables: list[list[list[str]]], fmt: str) -> str:
    out = []
    for table in tables:
        if fmt == "tsv":
            out.append("\n".join("\t".join(row) for row in table))
        else:
            widths = [
                max(len(row[c]) for row in table) for c in range(len(table[0]))
            ]
            out.append(
                "\n".join(
                    "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                    for row in table
                )
            )
    return "\n\n".join(out) + "\n"


# --- commands --------------------------------------------------------------


def cmd_extract(args) -> int:
    pairs = load_parallel(_read(args.src), _read(args.tgt))
    samples = []
    for src, tgt in pairs:
        edits = [
            replace(e, type_label="UNK") for e in extract_edits(src, tgt)
        ]
        samples.append(AnnotatedSample(src, {0: tuple(edits)}))
    _write_out(args, emit_m2(samples))
    return 0


def cmd_evaluate(args) -> int:
    bad = _check_format(args, ("tsv", "json"))
    if bad:
        return bad
    samples = parse_m2(_read(args.ref))
    hyp_edits = _load_hypotheses(args, samples)
    if args.drop_unchanged_refs:
        samples, hyp_edits = _apply_drop_unchanged(samples, hyp_edits)
    if not samples:
        raise DataError("no samples left to evaluate")
    chunked = _chunked_dataset(samples, hyp_edits)
    configs, meta = _resolve_configs(args, chunked)
    system = args.system or Path(args.hyp).stem
    rows = [
        run_variant(chunked, variant, cfg, args.fn_on_mismatch).as_row(system)
        for variant, cfg in configs.items()
    ]
    _write_out(args, _format_report(rows, meta, args.format))
    return 0


def cmd_chunks(args) -> int:
    bad = _check_format(args, ("tsv", "text"))
    if bad:
        return bad
    samples = parse_m2(_read(args.ref))
    hyp_edits = _load_hypotheses(args, samples)
    if args.drop_unchanged_refs:
        samples, hyp_edits = _apply_drop_unchanged(samples, hyp_edits)
    chunked = _chunked_dataset(samples, hyp_edits)
    tables = [chunk_table(cs, only_changed=args.only_changed) for cs in chunked]
    _write_out(args, _format_tables(tables, args.format))
    return 0


def cmd_stats(args) -> int:
    bad = _check_format(args, ("tsv", "json"))
    if bad:
        return bad
    samples = parse_m2(_read(args.ref))
    if args.drop_unchanged_refs:
        kept = []
        skipped = 0
        for sample in samples:
            filtered = drop_unchanged_references(sample)
            if filtered is None or len(filtered.annotator_ids) < 2:
                skipped += 1
                continue
            kept.append(filtered)
        if skipped:
            _warn(
                f"--drop-unchanged-refs left {skipped} sample(s) with fewer than "
                "2 annotators; skipped"
            )
        samples = kept
    stats = boundary_stats(samples, per_pass_mean=args.per_pass_mean)
    table = corpus_stats(samples)
    payload = dict(table)
    payload.update(
        {
            "icc": round(stats.icc, 4),
            "icc_count": stats.icc_count,
            "iuc": round(stats.iuc, 4),
            "iuc_count": stats.iuc_count,
            "cc": round(stats.cc, 4),
            "cc_count": stats.cc_count,
            "edits_held_out": stats.edits_total,
        }
    )
    for key, value in payload.items():
        if isinstance(value, float):
            payload[key] = round(value, 4)
    if args.format == "json":
        _write_out(args, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [f"{key}\t{value}" for key, value in payload.items()]
        _write_out(args, "\n".join(lines) + "\n")
    return 0


def cmd_correlate(args) -> int:
    bad = _check_format(args, ("tsv", "json"))
    if bad:
        return bad
    variant = args.variant[0] if args.variant else None
    metric = load_metric_scores(_read(args.scores), variant)
    human = load_human_table(_read(args.human))
    gamma, rho = correlate(metric, human)
    systems = sorted(metric)
    if args.format == "json":
        payload = {
            "pearson": round(gamma, 4),
            "spearman": round(rho, 4),
            "systems": [
                {"system": s, "metric": metric[s], "human": human.scores[s]}
                for s in systems
            ],
        }
        _write_out(args, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [f"pearson\t{gamma:.4f}", f"spearman\t{rho:.4f}", ""]
        lines.append("system\tmetric\thuman")
        lines.extend(f"{s}\t{metric[s]}\t{human.scores[s]}" for s in systems)
        _write_out(args, "\n".join(lines) + "\n")
    return 0


_COMMANDS = {
    "extract": cmd_extract,
    "evaluate": cmd_evaluate,
    "chunks": cmd_chunks,
    "stats": cmd_stats,
    "correlate": cmd_correlate,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        return _COMMANDS[args.command](args)
    except DataError as exc:
        _warn(str(exc))
        return 3
    except OSError as exc:
        _warn(str(exc))
        return 3


if __name__ == "__main__":
    sys.exit(main())
