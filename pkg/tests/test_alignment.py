import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import min_cost_breakdowns, textbook_edit_distance
from spokengec.alignment import (
    DELETE,
    EMPTY,
    INSERT,
    INSERTIONS_ONLY,
    MATCH,
    SUBSTITUTE,
    Alignment,
    AlignOp,
    align,
    corpus_wer,
    distance_table,
    edit_distance,
    wer,
)
from spokengec.corpus_io import ParallelCorpus, Transcript

tokens = st.lists(st.sampled_from("abcd"), max_size=8)


def kinds(a):
    return [op.kind for op in a.ops]


def test_identity():
    a = align(list("abc"), list("abc"))
    assert kinds(a) == [MATCH] * 3
    assert a.cost == 0


def test_forced_deletion():
    a = align(["the", "cat", "sat"], ["the", "cat"])
    assert kinds(a) == [MATCH, MATCH, DELETE]


def test_sub_and_delete_breakdown():
    ref, hyp = list("abcd"), list("axc")
    # oracle: every minimum-cost alignment has S=1, D=1, I=0
    cost, breakdowns = min_cost_breakdowns(ref, hyp)
    assert (cost, breakdowns) == (2, {(1, 1, 0)})
    a = align(ref, hyp)
    assert (a.count(SUBSTITUTE), a.count(DELETE), a.count(INSERT)) == (1, 1, 0)


def test_empty_sides():
    assert kinds(align([], [])) == []
    assert kinds(align(["a"], [])) == [DELETE]
    assert kinds(align([], ["a", "b"])) == [INSERT, INSERT]


def test_tie_break_prefers_diagonal_then_delete():
    # repeated word: the later copy is matched, the earlier one deleted
    a = align(["i", "i", "want"], ["i", "want"])
    assert a.ops[0] == AlignOp(DELETE, 0, None)
    assert a.ops[1] == AlignOp(MATCH, 1, 0)
    # ref "a b" vs hyp "b c": sub+sub ties with del+ins; diagonal wins
    assert kinds(align(["a", "b"], ["c", "a"])) == [SUBSTITUTE, SUBSTITUTE]
    assert kinds(align(["x", "a"], ["a", "y"])) == [SUBSTITUTE, SUBSTITUTE]


@given(tokens, tokens)
def test_cost_matches_textbook(ref, hyp):
    a = align(ref, hyp)
    assert a.cost == textbook_edit_distance(ref, hyp) == edit_distance(ref, hyp)
    assert distance_table(ref, hyp)[-1][-1] == a.cost


@given(tokens, tokens)
def test_alignment_invariants(ref, hyp):
    a = align(ref, hyp)
    a.check(ref, hyp)
    m, s, d, i = (a.count(k) for k in (MATCH, SUBSTITUTE, DELETE, INSERT))
    assert m + s + d == len(ref)
    assert m + s + i == len(hyp)


@given(tokens, tokens)
def test_align_is_deterministic(ref, hyp):
    assert align(ref, hyp) == align(list(ref), list(hyp))


def test_wer_formula():
    rep = wer(align(list("abcd"), list("abcd")))
    assert rep.wer == 0.0 and rep.flag is None
    ops = (
        [AlignOp(MATCH, k, k) for k in range(7)]
        + [AlignOp(SUBSTITUTE, 7, 7), AlignOp(DELETE, 8, None), AlignOp(MATCH, 9, 8)]
        + [AlignOp(INSERT, None, 9)]
    )
    rep = wer(Alignment(tuple(ops), 10, 10))
    assert (rep.subs, rep.dels, rep.ins) == (1, 1, 1)
    assert rep.wer == pytest.approx(30.0)


def test_wer_insertions_only():
    rep = wer(align([], ["a", "b"]))
    assert rep.flag == INSERTIONS_ONLY
    assert rep.ins == 2
    assert rep.wer == 100.0


def test_wer_both_empty():
    rep = wer(align([], []))
    assert rep.wer == 0.0 and rep.flag is None


@given(tokens, tokens)
def test_wer_zero_iff_no_errors(ref, hyp):
    rep = wer(align(ref, hyp))
    assert rep.wer >= 0
    assert (rep.wer == 0) == (rep.errors == 0)
    assert wer(align(ref, ref)).wer == 0


def _pc(pairs):
    return ParallelCorpus(
        tuple((f"u{k}", Transcript(f"u{k}", r), Transcript(f"u{k}", h)) for k, (r, h) in enumerate(pairs))
    )


def test_corpus_wer_pooled():
    pc = _pc([(list("abcde"), list("axcd")), (list("vwxyz"), list("vwxyz"))])
    rep = corpus_wer(pc)
    assert rep.errors == 2 and rep.ref_len == 10
    assert rep.wer == pytest.approx(20.0)
    assert rep.macro_wer == pytest.approx(20.0)


def test_corpus_wer_empty():
    rep = corpus_wer(ParallelCorpus())
    assert rep.flag == EMPTY and rep.wer == 0 and rep.errors == 0


def test_corpus_wer_matches_oracle_sum():
    rng = random.Random(5)
    pairs = [
        ([rng.choice("abcd") for _ in range(rng.randint(1, 8))],
         [rng.choice("abcd") for _ in range(rng.randint(0, 8))])
        for _ in range(100)
    ]
    expected = 100.0 * sum(textbook_edit_distance(r, h) for r, h in pairs) / sum(len(r) for r, _ in pairs)
    assert corpus_wer(_pc(pairs)).wer == pytest.approx(expected)


def test_corpus_wer_parallel_matches_serial():
    rng = random.Random(9)
    pairs = [([rng.choice("abc") for _ in range(6)], [rng.choice("abc") for _ in range(5)]) for _ in range(80)]
    assert corpus_wer(_pc(pairs), threads=2) == corpus_wer(_pc(pairs), threads=1)
