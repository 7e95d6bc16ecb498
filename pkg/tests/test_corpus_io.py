import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spokengec.corpus_io import (
    Corpus,
    LabeledTranscript,
    SynthParams,
    Transcript,
    emit_labels,
    emit_transcripts,
    pair_corpora,
    parse_label_file,
    parse_transcript_file,
    synth_corpus,
)
from spokengec.disfluency import remove_disfluencies
from spokengec.errors import DataError, UsageError


def test_parse_basic():
    corpus = parse_transcript_file("u1\thello world")
    assert corpus.ids() == ["u1"]
    assert corpus["u1"].tokens == ("hello", "world")


def test_parse_duplicate_id():
    with pytest.raises(DataError, match="duplicate utt_id u1"):
        parse_transcript_file("u1\ta\nu1\tb")


def test_parse_empty_utterance():
    corpus = parse_transcript_file("u1\t")
    assert corpus["u1"].tokens == ()


def test_parse_blank_lines_ignored():
    corpus = parse_transcript_file("\nu1\ta b\n\n\nu2\tc\n")
    assert corpus.ids() == ["u1", "u2"]


def test_parse_missing_tab_reports_line():
    with pytest.raises(DataError, match="line 2"):
        parse_transcript_file("u1\ta\nu2 b c\n")


@pytest.mark.parametrize("line", ["u1\tHello", "u1\ta  b", "u1\ta\tb", "u1\ta b\r"])
def test_parse_rejects_bad_tokens(line):
    with pytest.raises(DataError):
        parse_transcript_file(line)


def test_labels_attach():
    corpus = parse_transcript_file("u1\tuh yes\n")
    labeled = parse_label_file("u1\t1 0\n", corpus)
    assert labeled["u1"].labels == (1, 0)


def test_labels_count_mismatch():
    corpus = parse_transcript_file("u1\tuh yes\n")
    with pytest.raises(DataError, match="label count mismatch u1"):
        parse_label_file("u1\t1\n", corpus)


def test_labels_invalid_flag():
    corpus = parse_transcript_file("u1\tuh yes\n")
    with pytest.raises(DataError, match="invalid flag"):
        parse_label_file("u1\t2 0\n", corpus)


def test_labels_missing_utterance():
    corpus = parse_transcript_file("u1\tuh\nu2\tyes\n")
    with pytest.raises(DataError, match="u2"):
        parse_label_file("u1\t1\n", corpus)


def test_pair_corpora():
    a = parse_transcript_file("u1\ta\nu2\tb\n")
    b = parse_transcript_file("u2\tb\nu1\ta\n")
    pairs = pair_corpora(a, b)
    assert [p[0] for p in pairs] == ["u1", "u2"]


def test_pair_corpora_mismatch_lists_ids():
    a = parse_transcript_file("u1\ta\n")
    b = parse_transcript_file("u2\ta\n")
    with pytest.raises(DataError) as err:
        pair_corpora(a, b)
    assert "u1" in str(err.value) and "u2" in str(err.value)


def test_pair_corpora_caps_listing_at_ten():
    a = Corpus(tuple(Transcript(f"a{i}", ()) for i in range(20)))
    with pytest.raises(DataError) as err:
        pair_corpora(a, Corpus())
    assert str(err.value).count(",") == 9


def test_pair_empty():
    assert len(pair_corpora(Corpus(), Corpus())) == 0


_token = st.text(alphabet="abcxyz'-", min_size=1, max_size=5)
_line = st.tuples(st.text(alphabet="uv0123_", min_size=1, max_size=6), st.lists(_token, max_size=6))


@given(st.lists(_line, max_size=8, unique_by=lambda x: x[0]))
def test_emit_parse_round_trip(lines):
    text = "".join(f"{u}\t{' '.join(toks)}\n" for u, toks in lines)
    assert emit_transcripts(parse_transcript_file(text)) == text


def test_label_round_trip():
    text = "u1\t1 0 0\nu2\t\n"
    corpus = parse_label_file(text, parse_transcript_file("u1\tuh i go\nu2\t\n"))
    assert emit_labels(corpus) == text


def test_transcript_is_immutable():
    t = Transcript("u1", ["a"])
    with pytest.raises(AttributeError):
        t.tokens = ("b",)


# ---- synthetic corpora


def test_synth_empty():
    dsf, flt, gec = synth_corpus(7, 0)
    assert len(dsf) == len(flt) == len(gec) == 0


def test_synth_deterministic():
    a = synth_corpus(7, 5)
    b = synth_corpus(7, 5)
    assert emit_transcripts(a.dsf) == emit_transcripts(b.dsf)
    assert emit_labels(a.dsf) == emit_labels(b.dsf)
    assert emit_transcripts(a.flt) == emit_transcripts(b.flt)
    assert emit_transcripts(a.gec) == emit_transcripts(b.gec)
    assert a.injected == b.injected


def test_synth_seed_matters():
    assert emit_transcripts(synth_corpus(1, 20).gec) != emit_transcripts(synth_corpus(2, 20).gec)


def test_synth_filler_rate():
    params = SynthParams(filler_rate=0.1, repetition_rate=0.0)
    dsf, _, _ = synth_corpus(7, 1000, params)
    flags = [f for e in dsf for f in e.labels]
    assert abs(sum(flags) / len(flags) - 0.1) <= 0.02


def test_synth_removing_disfluencies_gives_flt():
    corpus = synth_corpus(11, 300)
    for entry in corpus.dsf:
        assert remove_disfluencies(entry).tokens == corpus.flt[entry.utt_id].tokens


def test_synth_empty_vocabulary():
    with pytest.raises(UsageError):
        synth_corpus(7, 3, SynthParams(vocabulary=()))
    # fine when nothing needs generating
    synth_corpus(7, 0, SynthParams(vocabulary=()))


def test_synth_bad_rate():
    with pytest.raises(UsageError):
        synth_corpus(7, 3, SynthParams(filler_rate=1.5))


def test_synth_labels_match_tokens():
    corpus = synth_corpus(3, 50)
    for entry in corpus.dsf:
        assert isinstance(entry, LabeledTranscript)
        assert len(entry.labels) == len(entry.tokens)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_synth_grammar_errors_only_when_recorded(seed):
    corpus = synth_corpus(seed, 5)
    for entry in corpus.flt:
        changed = entry.tokens != corpus.gec[entry.utt_id].tokens
        assert changed == bool(corpus.injected[entry.utt_id])
