import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exhaustive_ter_edits, textbook_edit_distance
from spokengec.alignment import EMPTY, INSERTIONS_ONLY
from spokengec.corpus_io import ParallelCorpus, Transcript
from spokengec.ter import best_shift, corpus_ter, ter

tokens = st.lists(st.sampled_from("abcd"), max_size=8)


def test_identical():
    s = ter(list("abc"), list("abc"))
    assert s.ter == 0 and s.shifts == 0


def test_block_swap():
    ref, hyp = list("abcd"), list("cdab")
    assert exhaustive_ter_edits(ref, hyp) == 1
    s = ter(ref, hyp)
    assert (s.shifts, s.subs, s.dels, s.ins) == (1, 0, 0, 0)
    assert s.ter == pytest.approx(25.0)


def test_no_beneficial_shift():
    ref, hyp = list("abc"), list("axc")
    assert exhaustive_ter_edits(ref, hyp) == 1
    s = ter(ref, hyp)
    assert s.shifts == 0
    assert s.ter == pytest.approx(100.0 / 3)


def test_tie_break_leftmost_then_longest():
    # "cd" at hyp start and "ab" at hyp end both fix everything; leftmost wins
    gain, start, length, dest, moved = best_shift(list("abcd"), list("cdab"))
    assert (gain, start, length) == (4, 0, 2)
    assert moved == list("abcd")


def test_empty_reference():
    s = ter([], ["a"])
    assert s.flag == INSERTIONS_ONLY and s.ins == 1


def test_shift_cap_recorded():
    ref = list("abcdefghij")
    hyp = list("badcfehgji")
    capped = ter(ref, hyp, max_shifts=1)
    assert capped.shifts == 1 and capped.shift_cap_hit
    full = ter(ref, hyp)
    assert not full.shift_cap_hit
    assert full.max_shifts == 10 and full.max_block == 10


@given(tokens)
def test_self_is_zero(x):
    assert ter(x, x).ter == 0


@settings(deadline=None)
@given(tokens, tokens)
def test_never_above_wer(ref, hyp):
    s = ter(ref, hyp)
    assert s.edits <= textbook_edit_distance(ref, hyp)
    assert s.ter >= 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("abc"), max_size=5), st.lists(st.sampled_from("abc"), max_size=5))
def test_never_below_exhaustive_optimum(ref, hyp):
    assert ter(ref, hyp).edits >= exhaustive_ter_edits(ref, hyp)


def _pc(pairs):
    return ParallelCorpus(
        tuple((f"u{k}", Transcript(f"u{k}", r), Transcript(f"u{k}", h)) for k, (r, h) in enumerate(pairs))
    )


def test_corpus_identical():
    pc = _pc([(list("abc"), list("abc")), (list("de"), list("de"))])
    assert corpus_ter(pc).ter == 0


def test_corpus_single_matches_pair():
    ref, hyp = list("abcde"), list("cdeab")
    single = ter(ref, hyp)
    pooled = corpus_ter(_pc([(ref, hyp)]))
    assert pooled.ter == pytest.approx(single.ter)
    assert pooled.edits == single.edits


def test_corpus_empty():
    assert corpus_ter(ParallelCorpus()).flag == EMPTY


def _synthetic_pair(rng):
    """A reference of length <= 6 and a hypothesis with one block move or word error."""
    ref = rng.sample("abcdefgh", rng.randint(2, 6))
    hyp = list(ref)
    kind = rng.choice(["move", "sub", "del", "ins", "none"])
    if kind == "move" and len(hyp) >= 3:
        start = rng.randrange(len(hyp) - 1)
        length = rng.randint(1, min(3, len(hyp) - start - 1) or 1)
        block = hyp[start : start + length]
        rest = hyp[:start] + hyp[start + length :]
        dest = rng.choice([k for k in range(len(rest) + 1) if k != start] or [0])
        hyp = rest[:dest] + block + rest[dest:]
    elif kind == "sub":
        hyp[rng.randrange(len(hyp))] = "z"
    elif kind == "del":
        del hyp[rng.randrange(len(hyp))]
    elif kind == "ins":
        hyp.insert(rng.randrange(len(hyp) + 1), "y")
    return ref, hyp


def test_corpus_matches_exhaustive_oracle():
    rng = random.Random(50)
    pairs = [_synthetic_pair(rng) for _ in range(50)]
    oracle = sum(exhaustive_ter_edits(r, h) for r, h in pairs)
    pooled = corpus_ter(_pc(pairs))
    assert pooled.edits == oracle
    assert pooled.ter == pytest.approx(100.0 * oracle / sum(len(r) for r, _ in pairs))
