"""Word-level Levenshtein alignment and WER with a Sub/Del/Ins breakdown.

Costs are 1 for substitution, deletion and insertion. When several
alignments share the minimum cost, the backtrace (run from the end of both
sequences) prefers the diagonal step (match/substitute), then deletion, then
insertion. The disfluency scorer relies on this order: a repeated word is
matched against its last copy, so the earlier copy is the one deleted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from spokengec._parallel import ordered_map
from spokengec.corpus_io import ParallelCorpus

MATCH = "match"
SUBSTITUTE = "substitute"
DELETE = "delete"
INSERT = "insert"
OP_KINDS = (MATCH, SUBSTITUTE, DELETE, INSERT)


@dataclass(frozen=True)
class AlignOp:
    kind: str
    ref_index: Optional[int] = None
    hyp_index: Optional[int] = None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[AlignOp, ...]
    ref_len: int
    hyp_len: int

    def count(self, kind: str) -> int:
        return sum(1 for op in self.ops if op.kind == kind)

    @property
    def cost(self) -> int:
        return sum(1 for op in self.ops if op.kind != MATCH)

    def check(self, ref: Sequence[str], hyp: Sequence[str]) -> None:
        """Raise AssertionError if the alignment is inconsistent with ``ref``/``hyp``."""
        next_ref = next_hyp = 0
        for op in self.ops:
            if op.kind in (MATCH, SUBSTITUTE):
                assert op.ref_index == next_ref and op.hyp_index == next_hyp
                same = ref[op.ref_index] == hyp[op.hyp_index]
                assert same == (op.kind == MATCH)
                next_ref += 1
                next_hyp += 1
            elif op.kind == DELETE:
                assert op.ref_index == next_ref and op.hyp_index is None
                next_ref += 1
            else:
                assert op.kind == INSERT and op.ref_index is None and op.hyp_index == next_hyp
                next_hyp += 1
        assert next_ref == self.ref_len == len(ref)
        assert next_hyp == self.hyp_len == len(hyp)


def distance_table(ref: Sequence[str], hyp: Sequence[str]) -> list[list[int]]:
    n, m = len(ref), len(hyp)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        row, prev = table[i], table[i - 1]
        row[0] = i
        r = ref[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (r != hyp[j - 1])
            up = prev[j] + 1
            left = row[j - 1] + 1
            row[j] = min(diag, up, left)
    return table


def edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> int:
    # two-row variant of distance_table
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        cur = [i] + [0] * len(hyp)
        for j, h in enumerate(hyp, start=1):
            cur[j] = min(prev[j - 1] + (r != h), prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[-1]


def align(ref: Sequence[str], hyp: Sequence[str]) -> Alignment:
    table = distance_table(ref, hyp)
    i, j = len(ref), len(hyp)
    ops: list[AlignOp] = []
    while i > 0 or j > 0:
        here = table[i][j]
        if i > 0 and j > 0:
            same = ref[i - 1] == hyp[j - 1]
            if here == table[i - 1][j - 1] + (not same):
                ops.append(AlignOp(MATCH if same else SUBSTITUTE, i - 1, j - 1))
                i -= 1
                j -= 1
                continue
        if i > 0 and here == table[i - 1][j] + 1:
            ops.append(AlignOp(DELETE, i - 1, None))
            i -= 1
        else:
            ops.append(AlignOp(INSERT, None, j - 1))
            j -= 1
    ops.reverse()
    return Alignment(tuple(ops), len(ref), len(hyp))


INSERTIONS_ONLY = "insertions_only"
EMPTY = "empty"


@dataclass(frozen=True)
class WerReport:
    subs: int
    dels: int
    ins: int
    ref_len: int
    hyp_len: int
    wer: float
    # None, INSERTIONS_ONLY (ref_len == 0 < hyp_len, rate taken over hyp_len)
    # or EMPTY (no utterances at all)
    flag: Optional[str] = None
    n_utts: int = 1
    macro_wer: Optional[float] = None

    @property
    def errors(self) -> int:
        return self.subs + self.dels + self.ins

    def rates(self) -> tuple[float, float, float]:
        """Sub/Del/Ins each as a percentage of ref_len."""
        if self.ref_len == 0:
            return (0.0, 0.0, 0.0)
        return tuple(100.0 * x / self.ref_len for x in (self.subs, self.dels, self.ins))

    def to_dict(self) -> dict:
        sub_rate, del_rate, ins_rate = self.rates()
        return {
            "subs": self.subs,
            "dels": self.dels,
            "ins": self.ins,
            "ref_len": self.ref_len,
            "hyp_len": self.hyp_len,
            "wer": round(self.wer, 4),
            "sub_rate": round(sub_rate, 4),
            "del_rate": round(del_rate, 4),
            "ins_rate": round(ins_rate, 4),
            "flag": self.flag,
            "n_utts": self.n_utts,
            "macro_wer": None if self.macro_wer is None else round(self.macro_wer, 4),
        }


def _report(subs, dels, ins, ref_len, hyp_len, n_utts=1, macro=None, empty=False) -> WerReport:
    if empty:
        return WerReport(0, 0, 0, 0, 0, 0.0, EMPTY, 0, None)
    errors = subs + dels + ins
    if ref_len > 0:
        rate, flag = 100.0 * errors / ref_len, None
    elif hyp_len > 0:
        rate, flag = 100.0 * ins / hyp_len, INSERTIONS_ONLY
    else:
        rate, flag = 0.0, None
    return WerReport(subs, dels, ins, ref_len, hyp_len, rate, flag, n_utts, macro)


def wer(alignment: Alignment) -> WerReport:
    return _report(
        alignment.count(SUBSTITUTE),
        alignment.count(DELETE),
        alignment.count(INSERT),
        alignment.ref_len,
        alignment.hyp_len,
    )


def _pair_counts(pair) -> tuple[int, int, int, int, int]:
    _, ref, hyp = pair
    a = align(ref.tokens, hyp.tokens)
    return a.count(SUBSTITUTE), a.count(DELETE), a.count(INSERT), a.ref_len, a.hyp_len


def corpus_wer(pairs: ParallelCorpus, threads: int = 1) -> WerReport:
    """Pooled WER; side A of each pair is the reference, side B the hypothesis."""
    if len(pairs) == 0:
        return _report(0, 0, 0, 0, 0, empty=True)
    counts = ordered_map(_pair_counts, list(pairs), threads)
    subs = sum(c[0] for c in counts)
    dels = sum(c[1] for c in counts)
    ins = sum(c[2] for c in counts)
    ref_len = sum(c[3] for c in counts)
    hyp_len = sum(c[4] for c in counts)
    per_utt = [100.0 * (s + d + i) / n for s, d, i, n, _ in counts if n > 0]
    macro = sum(per_utt) / len(per_utt) if per_utt else None
    return _report(subs, dels, ins, ref_len, hyp_len, len(counts), macro)
