import json

import pytest

from chunkeval import apply_edits, parse_m2, tokenize
from chunkeval.cli import main

REF_M2 = """S the technologies were improved
A 0 1|||DET|||-NONE-|||REQUIRED|||-NONE-|||0
A 2 3|||VERB|||have|||REQUIRED|||-NONE-|||0
A 0 1|||DET|||-NONE-|||REQUIRED|||-NONE-|||1
A 1 2|||NOUN|||technology|||REQUIRED|||-NONE-|||1
A 2 3|||VERB|||has|||REQUIRED|||-NONE-|||1

S it is good
A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0
A 0 1|||PRON|||It|||REQUIRED|||-NONE-|||1
"""

HYP_REF0 = "technologies have improved\nit is good\n"
HYP_SOURCE = "the technologies were improved\nit is good\n"


@pytest.fixture
def data(tmp_path):
    ref = tmp_path / "ref.m2"
    ref.write_text(REF_M2, encoding="utf-8")
    hyp0 = tmp_path / "ref0-as-hyp.txt"
    hyp0.write_text(HYP_REF0, encoding="utf-8")
    hyp_src = tmp_path / "source-as-hyp.txt"
    hyp_src.write_text(HYP_SOURCE, encoding="utf-8")
    return tmp_path


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report_rows(out):
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    header = lines[0].split("\t")
    return [dict(zip(header, line.split("\t"))) for line in lines[1:]]


class TestExtract:
    def test_identical_lines_give_noop(self, tmp_path, capsys):
        (tmp_path / "src.txt").write_text("a b\n", encoding="utf-8")
        (tmp_path / "tgt.txt").write_text("a b\n", encoding="utf-8")
        code, out, _ = run(
            capsys, ["extract", str(tmp_path / "src.txt"), str(tmp_path / "tgt.txt")]
        )
        assert code == 0
        assert out == "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n"

    def test_two_edit_block(self, tmp_path, capsys):
        (tmp_path / "src.txt").write_text("the technologies were\n", encoding="utf-8")
        (tmp_path / "tgt.txt").write_text("technologies have\n", encoding="utf-8")
        code, out, _ = run(
            capsys, ["extract", str(tmp_path / "src.txt"), str(tmp_path / "tgt.txt")]
        )
        assert code == 0
        assert out == (
            "S the technologies were\n"
            "A 0 1|||UNK|||-NONE-|||REQUIRED|||-NONE-|||0\n"
            "A 2 3|||UNK|||have|||REQUIRED|||-NONE-|||0\n\n"
        )

    def test_round_trip_reproduces_targets(self, tmp_path, capsys):
        src = "the technologies were\nx y z\na\n"
        tgt = "technologies have\nx q z w\n\n"
        (tmp_path / "src.txt").write_text(src, encoding="utf-8")
        (tmp_path / "tgt.txt").write_text(tgt, encoding="utf-8")
        out_path = tmp_path / "out.m2"
        code = main(
            [
                "extract",
                str(tmp_path / "src.txt"),
                str(tmp_path / "tgt.txt"),
                "-o",
                str(out_path),
            ]
        )
        assert code == 0
        samples = parse_m2(out_path.read_text(encoding="utf-8"))
        rebuilt = [
            " ".join(apply_edits(s.source, s.annotations[0])) for s in samples
        ]
        assert rebuilt == [" ".join(tokenize(line)) for line in tgt.splitlines()]


class TestEvaluate:
    def test_hypothesis_equal_to_annotator_zero(self, data, capsys):
        code, out, _ = run(
            capsys,
            [
                "evaluate",
                str(data / "ref0-as-hyp.txt"),
                str(data / "ref.m2"),
                "--variant",
                "dep",
                "--variant",
                "indep",
            ],
        )
        assert code == 0
        rows = report_rows(out)
        assert [r["variant"] for r in rows] == ["dep", "indep"]
        assert all(float(r["F_beta"]) == 1.0 for r in rows)
        assert all(float(r["Acc"]) == 1.0 for r in rows)

    def test_do_nothing_hypothesis(self, data, capsys):
        code, out, _ = run(
            capsys,
            [
                "evaluate",
                str(data / "source-as-hyp.txt"),
                str(data / "ref.m2"),
                "--variant",
                "dep",
                "--variant",
                "sent-dep",
            ],
        )
        assert code == 0
        rows = {r["variant"]: r for r in report_rows(out)}
        assert int(rows["dep"]["tp_n"]) == 0
        assert float(rows["dep"]["F_beta"]) == 0.0
        assert float(rows["dep"]["P"]) == 1.0
        # error-free sentence scores 1 by convention, the other scores 0
        assert float(rows["sent-dep"]["F_beta"]) == 0.5

    def test_json_format_and_meta(self, data, capsys):
        code, out, _ = run(
            capsys,
            [
                "evaluate",
                str(data / "ref0-as-hyp.txt"),
                str(data / "ref.m2"),
                "--format",
                "json",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["meta"]["fn_on_mismatch"] == "fp-only"
        assert payload["rows"][0]["variant"] == "dep"

    def test_hypothesis_m2_input(self, data, tmp_path, capsys):
        (tmp_path / "src.txt").write_text(
            "the technologies were improved\nit is good\n", encoding="utf-8"
        )
        hyp_m2 = tmp_path / "hyp.m2"
        code = main(
            [
                "extract",
                str(tmp_path / "src.txt"),
                str(data / "ref0-as-hyp.txt"),
                "-o",
                str(hyp_m2),
            ]
        )
        assert code == 0
        capsys.readouterr()
        code, out, _ = run(
            capsys,
            [
                "evaluate",
                str(hyp_m2),
                str(data / "ref.m2"),
                "--hyp-format",
                "m2",
            ],
        )
        assert code == 0
        assert float(report_rows(out)[0]["F_beta"]) == 1.0

    def test_multi_annotator_hypothesis_m2_uses_lowest_id(self, data, tmp_path, capsys):
        hyp_m2 = tmp_path / "hyp.m2"
        hyp_m2.write_text(
            "S the technologies were improved\n"
            "A 0 1|||DET|||-NONE-|||REQUIRED|||-NONE-|||0\n"
            "A 2 3|||VERB|||have|||REQUIRED|||-NONE-|||0\n"
            "A 0 4|||X|||nonsense|||REQUIRED|||-NONE-|||1\n"
            "\n"
            "S it is good\n"
            "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
            encoding="utf-8",
        )
        code, out, err = run(
            capsys,
            ["evaluate", str(hyp_m2), str(data / "ref.m2"), "--hyp-format", "m2"],
        )
        assert code == 0
        assert "annotator 0" in err
        assert float(report_rows(out)[0]["F_beta"]) == 1.0

    def test_hypothesis_m2_source_mismatch_is_data_error(self, data, tmp_path, capsys):
        hyp_m2 = tmp_path / "hyp.m2"
        hyp_m2.write_text(
            "S completely different sentence here\n"
            "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
            "\n"
            "S it is good\n"
            "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
            encoding="utf-8",
        )
        code, _, err = run(
            capsys,
            ["evaluate", str(hyp_m2), str(data / "ref.m2"), "--hyp-format", "m2"],
        )
        assert code == 3
        assert "sources differ" in err

    def test_line_count_mismatch_is_data_error(self, data, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("only one line\n", encoding="utf-8")
        code, _, err = run(capsys, ["evaluate", str(bad), str(data / "ref.m2")])
        assert code == 3
        assert "line" in err

    def test_missing_file_is_data_error(self, data, capsys):
        code, _, err = run(
            capsys, ["evaluate", "no-such or other.txt", str(data / "ref.m2")]
        )
        assert code == 3

    def test_usage_error_exits_2(self, data):
        with pytest.raises(SystemExit) as err:
            main(["evaluate", str(data / "ref0-as-hyp.txt")])
        assert err.value.code == 2

    def test_unknown_variant_exits_2(self, data):
        with pytest.raises(SystemExit) as err:
            main(
                [
                    "evaluate",
                    str(data / "ref0-as-hyp.txt"),
                    str(data / "ref.m2"),
                    "--variant",
                    "bogus",
                ]
            )
        assert err.value.code == 2

    def test_ell_override_appears_in_meta(self, data, capsys):
        code, out, _ = run(
            capsys,
            [
                "evaluate",
                str(data / "ref0-as-hyp.txt"),
                str(data / "ref.m2"),
                "--ell",
                "3.5",
            ],
        )
        assert code == 0
        assert "# ell: 3.5" in out

    def test_config_file_flags_win(self, data, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("ell=9.0\nvariant=dep,indep\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            [
                "evaluate",
                str(data / "ref0-as-hyp.txt"),
                str(data / "ref.m2"),
                "--config",
                str(cfg),
                "--ell",
                "3.0",
            ],
        )
        assert code == 0
        assert "# ell: 3.0" in out
        assert [r["variant"] for r in report_rows(out)] == ["dep", "indep"]

    def test_config_file_alone_sets_values(self, data, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("ell=9.0\nfn-on-mismatch=both\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            [
                "evaluate",
                str(data / "ref0-as-hyp.txt"),
                str(data / "ref.m2"),
                "--config",
                str(cfg),
            ],
        )
        assert code == 0
        assert "# ell: 9.0" in out
        assert "# fn_on_mismatch: both" in out

    def test_config_file_unknown_key_is_data_error(self, data, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("elll=9.0\n", encoding="utf-8")
        code, _, err = run(
            capsys,
            [
                "evaluate",
                str(data / "ref0-as-hyp.txt"),
                str(data / "ref.m2"),
                "--config",
                str(cfg),
            ],
        )
        assert code == 3
        assert "elll" in err

    def test_system_name_defaults_to_stem(self, data, capsys):
        _, out, _ = run(
            capsys, ["evaluate", str(data / "ref0-as-hyp.txt"), str(data / "ref.m2")]
        )
        assert report_rows(out)[0]["system"] == "ref0-as-hyp"

    def test_all_variants_run(self, data, capsys):
        argv = ["evaluate", str(data / "ref0-as-hyp.txt"), str(data / "ref.m2")]
        for variant in (
            "dep",
            "indep",
            "sent-dep",
            "sent-indep",
            "dep-acc",
            "indep-acc",
            "sent-dep-acc",
            "sent-indep-acc",
        ):
            argv += ["--variant", variant]
        code, out, _ = run(capsys, argv)
        assert code == 0
        assert len(report_rows(out)) == 8

    def test_edit_free_references_fall_back_to_raw_counts(self, tmp_path, capsys):
        ref = tmp_path / "noop.m2"
        ref.write_text(
            "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n"
            "S c d\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n",
            encoding="utf-8",
        )
        hyp = tmp_path / "hyp.txt"
        hyp.write_text("a x\nc d\n", encoding="utf-8")
        code, out, err = run(capsys, ["evaluate", str(hyp), str(ref)])
        assert code == 0
        assert "unweighted" in err
        row = report_rows(out)[0]
        # pinned weights: weighted totals equal the raw tallies
        assert float(row["fp_w"]) == float(row["fp_n"]) == 1.0

    def test_drop_unchanged_refs(self, data, capsys):
        code, out, err = run(
            capsys,
            [
                "evaluate",
                str(data / "source-as-hyp.txt"),
                str(data / "ref.m2"),
                "--variant",
                "sent-dep",
                "--drop-unchanged-refs",
            ],
        )
        assert code == 0
        # the noop annotator of sentence 2 is gone, so the do-nothing
        # hypothesis no longer gets the free 1.0 on that sentence
        assert float(report_rows(out)[0]["F_beta"]) == 0.0


class TestChunks:
    def test_tsv_tables(self, data, capsys):
        code, out, _ = run(
            capsys, ["chunks", str(data / "ref0-as-hyp.txt"), str(data / "ref.m2")]
        )
        assert code == 0
        tables = [t.splitlines() for t in out.strip().split("\n\n")]
        assert len(tables) == 2
        header = tables[0][0].split("\t")
        assert header == ["sequence", "chunk-1 *", "chunk-2"]
        assert tables[0][1].split("\t") == [
            "source",
            "the technologies were",
            "improved",
        ]

    def test_only_changed(self, data, capsys):
        code, out, _ = run(
            capsys,
            [
                "chunks",
                str(data / "ref0-as-hyp.txt"),
                str(data / "ref.m2"),
                "--only-changed",
            ],
        )
        assert code == 0
        first = out.strip().split("\n\n")[0].splitlines()
        assert first[0].split("\t") == ["sequence", "chunk-1 *"]

    def test_case_study_sample_gives_seven_columns(self, tmp_path, capsys):
        from test_chunker import TOP_HYP, TOP_REF1, TOP_REF2, TOP_SRC

        from chunkeval import AnnotatedSample, Edit, emit_m2, extract_edits

        ann = {
            aid: tuple(
                Edit(e.start, e.end, e.replacement, "T", aid)
                for e in extract_edits(TOP_SRC, ref)
            )
            for aid, ref in ((0, TOP_REF1), (1, TOP_REF2))
        }
        (tmp_path / "ref.m2").write_text(
            emit_m2([AnnotatedSample(TOP_SRC, ann)]), encoding="utf-8"
        )
        (tmp_path / "hyp.txt").write_text(" ".join(TOP_HYP) + "\n", encoding="utf-8")
        code, out, _ = run(
            capsys, ["chunks", str(tmp_path / "hyp.txt"), str(tmp_path / "ref.m2")]
        )
        assert code == 0
        header = out.splitlines()[0].split("\t")
        assert len(header) == 8  # label column + 7 chunk columns
        assert [h for h in header if h.endswith("*")] == [
            "chunk-2 *",
            "chunk-4 *",
            "chunk-6 *",
        ]

    def test_text_format_marks_changed_columns(self, data, capsys):
        code, out, _ = run(
            capsys,
            [
                "chunks",
                str(data / "ref0-as-hyp.txt"),
                str(data / "ref.m2"),
                "--format",
                "text",
            ],
        )
        assert code == 0
        assert "chunk-1 *" in out.splitlines()[0]


class TestStats:
    def test_boundary_counts(self, data, capsys):
        code, out, _ = run(capsys, ["stats", str(data / "ref.m2")])
        assert code == 0
        table = dict(line.split("\t") for line in out.strip().splitlines())
        assert table["icc_count"] == "4"
        assert table["iuc_count"] == "2"
        assert table["cc_count"] == "0"
        assert table["edits_held_out"] == "6"
        assert table["sentences"] == "2"
        assert table["references"] == "4"

    def test_json_format(self, data, capsys):
        code, out, _ = run(
            capsys, ["stats", str(data / "ref.m2"), "--format", "json"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["icc_count"] + payload["iuc_count"] + payload["cc_count"] == 6

    def test_single_annotator_is_data_error(self, tmp_path, capsys):
        single = tmp_path / "single.m2"
        single.write_text(
            "S a b\nA 0 1|||X|||c|||REQUIRED|||-NONE-|||0\n", encoding="utf-8"
        )
        code, _, err = run(capsys, ["stats", str(single)])
        assert code == 3
        assert "annotator" in err

    def test_drop_unchanged_refs_skips_thin_samples(self, data, capsys):
        code, out, err = run(
            capsys, ["stats", str(data / "ref.m2"), "--drop-unchanged-refs"]
        )
        assert code == 0
        assert "skipped" in err
        table = dict(line.split("\t") for line in out.strip().splitlines())
        assert table["sentences"] == "1"


class TestCorrelate:
    def test_simple_tables(self, tmp_path, capsys):
        (tmp_path / "metric.tsv").write_text(
            "system\tscore\ns1\t0.1\ns2\t0.2\ns3\t0.4\n", encoding="utf-8"
        )
        (tmp_path / "human.tsv").write_text(
            "system\tscore\ns1\t1.0\ns2\t2.0\ns3\t4.0\n", encoding="utf-8"
        )
        code, out, _ = run(
            capsys,
            ["correlate", str(tmp_path / "metric.tsv"), str(tmp_path / "human.tsv")],
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "pearson\t1.0000"
        assert lines[1] == "spearman\t1.0000"
        assert lines[3] == "system\tmetric\thuman"

    def test_report_input(self, data, tmp_path, capsys):
        reports = []
        for hyp, name in [
            ("ref0-as-hyp.txt", "good"),
            ("source-as-hyp.txt", "lazy"),
        ]:
            out_path = tmp_path / f"{name}.tsv"
            code = main(
                [
                    "evaluate",
                    str(data / hyp),
                    str(data / "ref.m2"),
                    "--system",
                    name,
                    "-o",
                    str(out_path),
                ]
            )
            assert code == 0
            reports.append(out_path.read_text(encoding="utf-8"))
        header = [l for l in reports[0].splitlines() if not l.startswith("#")][0]
        rows = [
            l
            for report in reports
            for l in report.splitlines()
            if l and not l.startswith("#") and not l.startswith("system\t")
        ]
        third = rows[1].replace("lazy", "third")
        merged = tmp_path / "merged.tsv"
        merged.write_text(header + "\n" + "\n".join(rows + [third]) + "\n")
        (tmp_path / "human.tsv").write_text(
            "system\tscore\ngood\t3.0\nlazy\t1.0\nthird\t1.5\n", encoding="utf-8"
        )
        code, out, _ = run(
            capsys,
            [
                "correlate",
                str(merged),
                str(tmp_path / "human.tsv"),
                "--format",
                "json",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["pearson"] > 0.8

    def test_system_mismatch_is_data_error(self, tmp_path, capsys):
        (tmp_path / "metric.tsv").write_text(
            "system\tscore\ns1\t0.1\ns2\t0.2\ns3\t0.4\n", encoding="utf-8"
        )
        (tmp_path / "human.tsv").write_text(
            "system\tscore\ns1\t1.0\ns2\t2.0\nsX\t4.0\n", encoding="utf-8"
        )
        code, _, err = run(
            capsys,
            ["correlate", str(tmp_path / "metric.tsv"), str(tmp_path / "human.tsv")],
        )
        assert code == 3
        assert "s3" in err and "sX" in err


def test_unsupported_format_is_usage_error(data, capsys):
    code, _, err = run(
        capsys,
        [
            "chunks",
            str(data / "ref0-as-hyp.txt"),
            str(data / "ref.m2"),
            "--format",
            "json",
        ],
    )
    assert code == 2
    assert "tsv" in err


def test_module_entry_point(data):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "chunkeval", "stats", str(data / "ref.m2")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "icc_count\t4" in proc.stdout
