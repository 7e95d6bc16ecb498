"""Translation edit rate: word edit distance plus block shifts, each shift costing one edit.

The shift search is greedy. At each round every hypothesis block that
(a) matches some reference substring and (b) holds at least one word that
is not matched under the current alignment is tried at destinations anchored
on that reference occurrence; the move with the largest drop in edit
distance wins. Ties go to the leftmost block start, then the longer block,
then the leftmost destination. A move is only accepted if it lowers the edit
distance, so the final rate never exceeds plain WER.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from spokengec._parallel import ordered_map
from spokengec.alignment import (
    DELETE,
    EMPTY,
    INSERT,
    INSERTIONS_ONLY,
    MATCH,
    SUBSTITUTE,
    align,
    edit_distance,
)
from spokengec.corpus_io import ParallelCorpus

MAX_SHIFTS = 10
MAX_BLOCK = 10


@dataclass(frozen=True)
class TerScore:
    shifts: int
    subs: int
    dels: int
    ins: int
    ref_len: int
    hyp_len: int
    ter: float
    flag: Optional[str] = None
    shift_cap_hit: bool = False
    max_shifts: int = MAX_SHIFTS
    max_block: int = MAX_BLOCK
    n_utts: int = 1

    @property
    def edits(self) -> int:
        return self.shifts + self.subs + self.dels + self.ins

    def to_dict(self) -> dict:
        return {
            "shifts": self.shifts,
            "subs": self.subs,
            "dels": self.dels,
            "ins": self.ins,
            "ref_len": self.ref_len,
            "hyp_len": self.hyp_len,
            "ter": round(self.ter, 4),
            "flag": self.flag,
            "shift_cap_hit": self.shift_cap_hit,
            "max_shifts": self.max_shifts,
            "max_block": self.max_block,
            "n_utts": self.n_utts,
        }


def _rate(edits: int, ins: int, ref_len: int, hyp_len: int) -> tuple[float, Optional[str]]:
    if ref_len > 0:
        return 100.0 * edits / ref_len, None
    if hyp_len > 0:
        return 100.0 * ins / hyp_len, INSERTIONS_ONLY
    return 0.0, None


def _hyp_anchor(ops, ref_pos: int) -> int:
    """Hypothesis position sitting just before reference position ``ref_pos``."""
    consumed = 0
    for op in ops:
        if op.ref_index is not None and op.ref_index >= ref_pos:
            return consumed
        if op.hyp_index is not None:
            consumed += 1
    return consumed


def _destinations(ref, rest, j, length, anchor):
    dests = set()
    if anchor is not None:
        dests.add(anchor)
    for k in range(len(rest) + 1):
        left_ok = (k == 0) if j == 0 else (k > 0 and rest[k - 1] == ref[j - 1])
        end = j + length
        right_ok = (k == len(rest)) if end == len(ref) else (k < len(rest) and rest[k] == ref[end])
        if left_ok or right_ok:
            dests.add(k)
    return sorted(dests)


def best_shift(ref: Sequence[str], hyp: Sequence[str], max_block: int = MAX_BLOCK):
    """Best admissible shift as (gain, start, length, dest, new_hyp), or None.

    ``dest`` indexes the hypothesis after the block has been removed.
    """
    base = edit_distance(ref, hyp)
    if base == 0:
        return None
    alignment = align(ref, hyp)
    misaligned = [True] * len(hyp)
    for op in alignment.ops:
        if op.kind == MATCH:
            misaligned[op.hyp_index] = False

    best = None
    for start in range(len(hyp)):
        for length in range(1, min(max_block, len(hyp) - start) + 1):
            block = list(hyp[start : start + length])
            occurrences = [
                j for j in range(len(ref) - length + 1) if list(ref[j : j + length]) == block
            ]
            if not occurrences:
                # a longer block starting here cannot match either
                break
            if not any(misaligned[start : start + length]):
                continue
            rest = list(hyp[:start]) + list(hyp[start + length :])
            for j in occurrences:
                anchor = _hyp_anchor(alignment.ops, j)
                if anchor >= start + length:
                    anchor -= length
                elif anchor > start:
                    anchor = None
                for dest in _destinations(ref, rest, j, length, anchor):
                    if dest == start:
                        continue
                    moved = rest[:dest] + block + rest[dest:]
                    gain = base - edit_distance(ref, moved)
                    if gain <= 0:
                        continue
                    key = (gain, -start, length, -dest)
                    if best is None or key > best[0]:
                        best = (key, (gain, start, length, dest, moved))
    return None if best is None else best[1]


def ter(
    ref: Sequence[str],
    hyp: Sequence[str],
    max_shifts: int = MAX_SHIFTS,
    max_block: int = MAX_BLOCK,
) -> TerScore:
    current = list(hyp)
    shifts = 0
    cap_hit = False
    while True:
        found = best_shift(ref, current, max_block)
        if found is None:
            break
        if shifts >= max_shifts:
            cap_hit = True
            break
        current = found[4]
        shifts += 1
    a = align(ref, current)
    subs, dels, ins = a.count(SUBSTITUTE), a.count(DELETE), a.count(INSERT)
    rate, flag = _rate(shifts + subs + dels + ins, ins, len(ref), len(hyp))
    return TerScore(
        shifts, subs, dels, ins, len(ref), len(hyp), rate, flag, cap_hit, max_shifts, max_block
    )


def _pair_ter(pair) -> TerScore:
    _, ref, hyp = pair
    return ter(ref.tokens, hyp.tokens)


def corpus_ter(pairs: ParallelCorpus, threads: int = 1) -> TerScore:
    """Pooled TER over (utt_id, reference, hypothesis) pairs."""
    if len(pairs) == 0:
        return TerScore(0, 0, 0, 0, 0, 0, 0.0, EMPTY, n_utts=0)
    scores = ordered_map(_pair_ter, list(pairs), threads)
    shifts = sum(s.shifts for s in scores)
    subs = sum(s.subs for s in scores)
    dels = sum(s.dels for s in scores)
    ins = sum(s.ins for s in scores)
    ref_len = sum(s.ref_len for s in scores)
    hyp_len = sum(s.hyp_len for s in scores)
    rate, flag = _rate(shifts + subs + dels + ins, ins, ref_len, hyp_len)
    return TerScore(
        shifts,
        subs,
        dels,
        ins,
        ref_len,
        hyp_len,
        rate,
        flag,
        any(s.shift_cap_hit for s in scores),
        n_utts=len(scores),
    )
