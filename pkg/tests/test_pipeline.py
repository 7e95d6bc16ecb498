import pytest

from conftest import perfect_asr_config, write_config, write_synth
from spokengec.corpus_io import Corpus, SynthParams, parse_transcript_file, synth_corpus
from spokengec.errors import DataError, UsageError
from spokengec.pipeline import PipelineConfig, cascade, dumps, report_bundle, run_pipeline

QUIET = SynthParams(filler_rate=0.0, repetition_rate=0.0, grammar_error_rate=0.0)


def run(tmp_path, entries):
    return run_pipeline(PipelineConfig.from_file(write_config(tmp_path / "run.cfg", entries)))


def all_scores(body):
    for system in body["dd"].values():
        for mode in ("macro", "micro"):
            yield system[mode]["f1"]
    for system in body["gec"].values():
        yield system["score"]["f_beta"]


def test_identity_config(tmp_path):
    # a fluent, error-free corpus: every view is the same file
    files = write_synth(tmp_path, 5, 40, QUIET)
    same = files["dsf"].name
    entries = {k: same for k in perfect_asr_config(files)}
    entries["references.labels"] = files["labels"].name
    body = run(tmp_path, entries)
    for grid in body["wer_grid"].values():
        for rep in grid.values():
            assert rep["wer"] == 0
    for rep in body["ter_vs_gec"].values():
        assert rep["ter"] == 0
    assert set(all_scores(body)) == {100.0}


def test_synthetic_perfect_asr(tmp_path):
    files = write_synth(tmp_path, 11, 200)
    body = run(tmp_path, perfect_asr_config(files))
    for view in ("dsf", "flt", "gec"):
        assert body["wer_grid"][f"asr_{view}"][view]["wer"] == 0
    assert body["wer_grid"]["cascade_flt"]["flt"]["wer"] == 0
    assert body["wer_grid"]["asr_flt"]["gec"]["wer"] > 0
    assert set(all_scores(body)) == {100.0}
    assert body["dd"]["cascade_flt"]["unprojected"] == 0
    assert body["stages"] == {"dd": "rules", "gec": "corrections"}


def test_cascade_flt_equals_generator_flt():
    corpus = synth_corpus(4, 300)
    out = cascade(Corpus(tuple(e.transcript for e in corpus.dsf)))
    assert [e.tokens for e in out.flt] == [e.tokens for e in corpus.flt]
    assert out.gec_passthrough


def test_cascade_fillers_only_without_corrections():
    dsf = parse_transcript_file("u1\tuh i um go\n")
    out = cascade(dsf)
    assert out.flt["u1"].tokens == ("i", "go")
    assert out.gec is out.flt and out.gec_passthrough


def test_cascade_empty():
    out = cascade(Corpus(), corrections=Corpus())
    assert len(out.flt) == 0 and len(out.gec) == 0


def test_cascade_missing_correction():
    dsf = parse_transcript_file("u1\ti go\nu2\tyou go\n")
    with pytest.raises(DataError, match="u2"):
        cascade(dsf, corrections=parse_transcript_file("u1\ti go\n"))


def _shift_workspace(tmp_path):
    # the recogniser dropped "yesterday" before the verb that needs fixing
    (tmp_path / "ref_flt.tsv").write_text("u1\tyesterday i cook dinner\n")
    (tmp_path / "ref_gec.tsv").write_text("u1\tyesterday i cooked dinner\n")
    (tmp_path / "ref_dsf.tsv").write_text("u1\tyesterday i cook dinner\n")
    (tmp_path / "ref_labels.tsv").write_text("u1\t0 0 0 0\n")
    (tmp_path / "asr_dsf.tsv").write_text("u1\ti cook dinner\n")
    (tmp_path / "asr_gec.tsv").write_text("u1\ti cooked dinner\n")
    return {
        "asr.dsf": "asr_dsf.tsv",
        "gec.corrections": "asr_gec.tsv",
        "references.dsf": "ref_dsf.tsv",
        "references.labels": "ref_labels.tsv",
        "references.flt": "ref_flt.tsv",
        "references.gec": "ref_gec.tsv",
    }


def test_disabling_shift_loses_true_positives(tmp_path):
    entries = _shift_workspace(tmp_path)
    shifted = run(tmp_path, entries)["gec"]["cascade_gec"]["score"]
    plain = run(tmp_path, {**entries, "scoring.shift": "false"})["gec"]["cascade_gec"]["score"]
    assert (shifted["tp"], shifted["fp"], shifted["fn"]) == (1, 0, 0)
    assert (plain["tp"], plain["fp"], plain["fn"]) == (0, 1, 1)


def test_body_is_deterministic(tmp_path):
    files = write_synth(tmp_path, 3, 50)
    entries = perfect_asr_config(files)
    a = dumps(run(tmp_path, entries))
    b = dumps(run(tmp_path, entries))
    assert a == b
    bundle = report_bundle(run(tmp_path, entries), "2000-01-01T00:00:00+00:00")
    assert dumps(bundle["body"]) == a
    assert len(bundle["meta"]["body_sha256"]) == 64


def test_histograms_exclude_other_by_default(tmp_path):
    files = write_synth(tmp_path, 3, 100)
    body = run(tmp_path, perfect_asr_config(files))
    labels = [row["label"] for row in body["reference_histogram"]]
    assert labels and not any(lab.endswith(":OTHER") for lab in labels)
    counts = [row["count"] for row in body["reference_histogram"]]
    assert counts == sorted(counts, reverse=True)


def test_labels_mode(tmp_path):
    files = write_synth(tmp_path, 9, 30)
    entries = perfect_asr_config(files)
    entries["dd.labels"] = files["labels"].name
    body = run(tmp_path, entries)
    assert body["stages"]["dd"] == "labels"
    assert body["wer_grid"]["cascade_flt"]["flt"]["wer"] == 0


@pytest.mark.parametrize(
    "text,match",
    [
        ("bogus.key = 1\n", "unknown key"),
        ("asr.dsf = a\nasr.dsf = b\n", "duplicate"),
        ("asr.dsf = a\n", "no evaluation"),
        ("asr.flt = a\nreferences.flt = b\ndd.mode = rules\n", "asr.dsf"),
        ("asr.dsf = a\nreferences.flt = b\ngec.mode = corrections\n", "gec.corrections"),
        ("asr.dsf = a\nreferences.flt = b\nscoring.beta = 0\n", "beta"),
        ("asr.dsf = a\nreferences.flt = b\nscoring.averaging = weighted\n", "averaging"),
        ("asr.dsf = a\nreferences.flt = b\nscoring.shift = perhaps\n", "boolean"),
        ("no equals sign\n", "key = value"),
    ],
)
def test_config_errors(text, match):
    with pytest.raises(UsageError, match=match):
        PipelineConfig.from_text(text)


def test_missing_input_file(tmp_path):
    entries = {"asr.flt": "nope.tsv", "references.flt": "nope.tsv", "dd.mode": "skip"}
    with pytest.raises(DataError, match="nope.tsv"):
        run(tmp_path, entries)


def test_utt_mismatch(tmp_path):
    (tmp_path / "a.tsv").write_text("u1\ta\n")
    (tmp_path / "b.tsv").write_text("u2\ta\n")
    with pytest.raises(DataError, match="u1"):
        run(tmp_path, {"asr.flt": "a.tsv", "references.flt": "b.tsv", "dd.mode": "skip"})


def test_grid_diagonal_is_row_minimum(tmp_path):
    import random

    from spokengec.corpus_io import Transcript, emit_transcripts
    from spokengec.pipeline import load_transcripts

    files = write_synth(tmp_path, 17, 200)
    rng = random.Random(1)
    entries = dict(perfect_asr_config(files))
    for view in ("dsf", "flt", "gec"):
        noisy = []
        for e in load_transcripts(files[view]):
            toks = [t if rng.random() > 0.05 else "zz" for t in e.tokens]
            noisy.append(Transcript(e.utt_id, tuple(toks)))
        (tmp_path / f"noisy_{view}.tsv").write_text(emit_transcripts(noisy))
        entries[f"asr.{view}"] = f"noisy_{view}.tsv"
    entries["gec.corrections"] = "noisy_gec.tsv"
    grid = run(tmp_path, entries)["wer_grid"]
    for view in ("dsf", "flt", "gec"):
        row = grid[f"asr_{view}"]
        assert row[view]["wer"] == min(r["wer"] for r in row.values())
        assert row[view]["wer"] > 0
