"""ERRANT-style grammatical edits: extraction, classification, span shifting and scoring.

Edits are extracted from a word alignment of source and corrected tokens:
each maximal run of non-matching operations becomes one edit, except that a
determiner inserted or deleted at either end of a longer run is split off as
its own edit (``cook -> cooked the`` yields ``cook -> cooked`` plus a missing
``the``).

Hypothesis edits live in the coordinates of the ASR transcript they were
extracted from. Before they are matched against reference edits they are
moved into reference-transcript coordinates by counting the ASR deletions
and insertions that precede each edit.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from spokengec.alignment import DELETE, INSERT, MATCH, Alignment, align
from spokengec.disfluency import f_measure, prf
from spokengec.errors import DataError, UsageError
from spokengec.lexicon import (
    BASE,
    DEFAULT_LEXICON,
    GERUND,
    PAST,
    PAST_PART,
    THIRD_SG,
    Lexicon,
)

PREFIXES = ("R", "M", "U")
CATEGORIES = (
    "DET", "PREP", "PRON", "CONJ", "NOUN", "NOUN:NUM", "VERB", "VERB:FORM",
    "VERB:TENSE", "VERB:SVA", "ADJ", "ADV", "OTHER",
)


@dataclass(frozen=True, order=True)
class EditLabel:
    op_prefix: str
    category: str

    def __post_init__(self) -> None:
        if self.op_prefix not in PREFIXES:
            raise ValueError(f"unknown edit prefix {self.op_prefix!r}")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown edit category {self.category!r}")

    def __str__(self) -> str:
        return f"{self.op_prefix}:{self.category}"

    @classmethod
    def parse(cls, text: str) -> "EditLabel":
        prefix, _, category = text.partition(":")
        try:
            return cls(prefix, category)
        except ValueError as exc:
            raise DataError(str(exc)) from None

    @property
    def is_other(self) -> bool:
        return self.category == "OTHER"


@dataclass(frozen=True)
class Edit:
    src_start: int
    src_end: int
    replacement: tuple[str, ...]
    label: Optional[EditLabel] = field(default=None, compare=False)
    clamped: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "replacement", tuple(self.replacement))
        if not 0 <= self.src_start <= self.src_end:
            raise ValueError(f"bad edit span ({self.src_start}, {self.src_end})")
        if self.src_start == self.src_end and not self.replacement:
            raise ValueError("edit with empty span and empty replacement")

    @property
    def key(self) -> tuple[int, int, tuple[str, ...]]:
        return (self.src_start, self.src_end, self.replacement)

    def with_label(self, label: EditLabel) -> "Edit":
        return replace(self, label=label)


# --------------------------------------------------------------------------
# extraction


def _split_run(s0, s1, c0, c1, src, cor, lex: Lexicon) -> list[Edit]:
    dets = lex.determiners
    if s1 - s0 == 0 or c1 - c0 == 0 or (s1 - s0) + (c1 - c0) <= 2:
        return [Edit(s0, s1, tuple(cor[c0:c1]))]
    head: list[Edit] = []
    tail: list[Edit] = []
    if c1 - c0 > 1 and cor[c1 - 1] in dets and src[s1 - 1] not in dets:
        tail.append(Edit(s1, s1, (cor[c1 - 1],)))
        c1 -= 1
    elif s1 - s0 > 1 and src[s1 - 1] in dets and cor[c1 - 1] not in dets:
        tail.append(Edit(s1 - 1, s1, ()))
        s1 -= 1
    if c1 - c0 > 1 and cor[c0] in dets and src[s0] not in dets:
        head.append(Edit(s0, s0, (cor[c0],)))
        c0 += 1
    elif s1 - s0 > 1 and src[s0] in dets and cor[c0] not in dets:
        head.append(Edit(s0, s0 + 1, ()))
        s0 += 1
    return head + [Edit(s0, s1, tuple(cor[c0:c1]))] + tail


def extract_edits(
    src: Sequence[str], cor: Sequence[str], lex: Lexicon = DEFAULT_LEXICON
) -> list[Edit]:
    """Unlabelled edits turning ``src`` into ``cor``, ordered by source position."""
    alignment = align(src, cor)
    edits: list[Edit] = []
    run_src: Optional[int] = None
    run_cor = 0
    s = c = 0
    for op in list(alignment.ops) + [None]:
        if op is None or op.kind == MATCH:
            if run_src is not None and (s > run_src or c > run_cor):
                edits.extend(_split_run(run_src, s, run_cor, c, src, cor, lex))
            run_src = None
            if op is None:
                break
            s += 1
            c += 1
            continue
        if run_src is None:
            run_src, run_cor = s, c
        if op.kind != INSERT:
            s += 1
        if op.kind != DELETE:
            c += 1
    return edits


def apply_edits(src: Sequence[str], edits: Iterable[Edit]) -> list[str]:
    """Apply non-overlapping edits to ``src``, right to left."""
    out = list(src)
    ordered = sorted(edits, key=lambda e: (e.src_start, e.src_end))
    for edit in reversed(ordered):
        out[edit.src_start : edit.src_end] = edit.replacement
    return out


# --------------------------------------------------------------------------
# classification

_VERB_CONTEXT = frozenset(
    "to can could will would shall should may might must do does did i you we they he she it".split()
)


def _readings(token: str, prev: Optional[str], lex: Lexicon) -> tuple[bool, bool]:
    """(noun?, verb?) readings of ``token``; context decides when both apply."""
    noun, verb = lex.is_noun(token), lex.is_verb(token)
    if noun and verb:
        if prev is not None and prev in _VERB_CONTEXT:
            return False, True
        return True, False
    return noun, verb


def _one_sided_category(token: str, prev: Optional[str], lex: Lexicon) -> str:
    closed = lex.closed_class(token)
    if closed:
        return closed
    noun, verb = _readings(token, prev, lex)
    if verb:
        return "VERB"
    if noun:
        return "NOUN"
    if lex.is_adjective(token):
        return "ADJ"
    if lex.is_adverb(token):
        return "ADV"
    return "OTHER"


_VERB_PRIORITY = {"VERB:SVA": 0, "VERB:TENSE": 1, "VERB:FORM": 2}


def _verb_form_pair(a: str, b: str) -> Optional[str]:
    if a == b:
        # different spellings, same slot: am/are, was/were
        return "VERB:SVA"
    pair = {a, b}
    if GERUND in pair:
        return "VERB:FORM"
    if pair == {BASE, THIRD_SG}:
        return "VERB:SVA"
    if PAST in pair and pair & {BASE, THIRD_SG}:
        return "VERB:TENSE"
    if PAST_PART in pair:
        return "VERB:FORM"
    return None


def _verb_inflection(a: str, b: str, lex: Lexicon) -> Optional[str]:
    ra, rb = lex.verb_analyses(a), lex.verb_analyses(b)
    shared = {lemma for lemma, _ in ra} & {lemma for lemma, _ in rb}
    found = set()
    for lemma in shared:
        for la, ta in ra:
            for lb, tb in rb:
                if la == lemma == lb:
                    cat = _verb_form_pair(ta, tb)
                    if cat:
                        found.add(cat)
    if not found:
        return None
    return min(found, key=_VERB_PRIORITY.__getitem__)


def _noun_number(a: str, b: str, lex: Lexicon) -> bool:
    ra, rb = lex.noun_analyses(a), lex.noun_analyses(b)
    return any(la == lb and na != nb for la, na in ra for lb, nb in rb)


def _two_sided_category(a: str, b: str, prev: Optional[str], lex: Lexicon) -> str:
    ca, cb = lex.closed_class(a), lex.closed_class(b)
    if ca or cb:
        return ca if ca == cb else "OTHER"

    noun_a, verb_a = _readings(a, prev, lex)
    noun_b, verb_b = _readings(b, prev, lex)
    if noun_a and noun_b and _noun_number(a, b, lex):
        return "NOUN:NUM"
    if verb_a and verb_b:
        inflection = _verb_inflection(a, b, lex)
        if inflection:
            return inflection
        return "VERB"
    if noun_a and noun_b:
        return "NOUN"
    if lex.is_adverb(a) and lex.is_adverb(b):
        return "ADV"
    if lex.is_adjective(a) and lex.is_adjective(b):
        return "ADJ"
    # noun/verb readings picked apart by context, e.g. "the work" -> "the works"
    if (lex.is_noun(a) or lex.is_verb(a)) and _noun_number(a, b, lex):
        return "NOUN:NUM"
    return "OTHER"


def classify_edit(
    edit: Edit, src: Sequence[str], cor: Sequence[str] = (), lex: Lexicon = DEFAULT_LEXICON
) -> EditLabel:
    """Rule cascade giving an ERRANT-style label; OTHER is the only fallback."""
    orig = list(src[edit.src_start : edit.src_end])
    corr = list(edit.replacement)
    prev = src[edit.src_start - 1] if edit.src_start > 0 else None
    if not orig:
        prefix, tokens = "M", corr
    elif not corr:
        prefix, tokens = "U", orig
    else:
        prefix, tokens = "R", None

    if tokens is not None:
        category = _one_sided_category(tokens[0], prev, lex) if len(tokens) == 1 else "OTHER"
    elif len(orig) == 1 and len(corr) == 1:
        category = _two_sided_category(orig[0], corr[0], prev, lex)
    else:
        category = "OTHER"
    return EditLabel(prefix, category)


def annotate(src: Sequence[str], cor: Sequence[str], lex: Lexicon = DEFAULT_LEXICON) -> list[Edit]:
    """Extract and classify all edits between ``src`` and ``cor``."""
    return [e.with_label(classify_edit(e, src, cor, lex)) for e in extract_edits(src, cor, lex)]


# --------------------------------------------------------------------------
# span shifting


def _offsets(alignment: Alignment) -> list[tuple[int, int]]:
    """Per hypothesis position h (0..hyp_len): (#deletes, #inserts) in ops before h."""
    table: list[tuple[int, int]] = []
    dels = ins = 0
    for op in alignment.ops:
        if op.hyp_index is not None:
            table.append((dels, ins))
        if op.kind == DELETE:
            dels += 1
        elif op.kind == INSERT:
            ins += 1
    table.append((dels, ins))
    return table


def shift_spans(hyp_edits: Sequence[Edit], asr_alignment: Alignment) -> list[Edit]:
    """Move hypothesis-transcript edits into reference-transcript coordinates.

    ``asr_alignment`` has the reference transcript on its reference side and
    the hypothesis transcript on its hypothesis side. Only ASR operations
    strictly before an edit's start move it; the end moves by the same
    amount. Spans pushed outside the reference are clamped and flagged.
    """
    offsets = _offsets(asr_alignment)
    ref_len = asr_alignment.ref_len
    shifted = []
    for edit in hyp_edits:
        if edit.src_end > asr_alignment.hyp_len:
            raise DataError(
                f"edit span ({edit.src_start}, {edit.src_end}) exceeds hypothesis length "
                f"{asr_alignment.hyp_len}"
            )
        dels, ins = offsets[edit.src_start]
        start = edit.src_start + dels - ins
        end = edit.src_end + dels - ins
        new_start = min(max(start, 0), ref_len)
        new_end = min(max(end, new_start), ref_len)
        clamped = edit.clamped or (new_start, new_end) != (start, end)
        if new_start == new_end and not edit.replacement:
            # a deletion squeezed to nothing; keep one reference token
            if new_end < ref_len:
                new_end += 1
            else:
                new_start -= 1
            clamped = True
        shifted.append(replace(edit, src_start=new_start, src_end=new_end, clamped=clamped))
    return shifted


# --------------------------------------------------------------------------
# matching and scoring


@dataclass(frozen=True)
class MatchResult:
    tp: tuple[tuple[Edit, Edit], ...]
    fp: tuple[Edit, ...]
    fn: tuple[Edit, ...]

    def counts(self) -> tuple[int, int, int]:
        return len(self.tp), len(self.fp), len(self.fn)


def match_edits(hyp_edits: Sequence[Edit], ref_edits: Sequence[Edit]) -> MatchResult:
    """Greedy one-to-one matching on (start, end, replacement); labels are ignored."""
    used = [False] * len(ref_edits)
    tp, fp = [], []
    for h in hyp_edits:
        for k, r in enumerate(ref_edits):
            if not used[k] and r.key == h.key:
                used[k] = True
                tp.append((h, r))
                break
        else:
            fp.append(h)
    fn = [r for k, r in enumerate(ref_edits) if not used[k]]
    return MatchResult(tuple(tp), tuple(fp), tuple(fn))


@dataclass(frozen=True)
class GecScore:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_beta: float
    beta: float = 0.5

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": round(self.precision, 4),
            "recall": round(self.recall, 4),
            "f_beta": round(self.f_beta, 4),
            "beta": self.beta,
        }


def f_beta(precision: float, recall: float, beta: float = 0.5) -> float:
    """(1 + b^2) P R / (b^2 P + R); 0 when the denominator vanishes."""
    if beta <= 0:
        raise UsageError(f"beta must be positive, got {beta}")
    return f_measure(precision, recall, beta)


def gec_score(tp: int, fp: int, fn: int, beta: float = 0.5) -> GecScore:
    if beta <= 0:
        raise UsageError(f"beta must be positive, got {beta}")
    if min(tp, fp, fn) < 0:
        raise UsageError("edit counts must be non-negative")
    p, r, f = prf(tp, fp, fn, beta)
    return GecScore(tp, fp, fn, p, r, f, beta)


def _label_name(edit: Edit) -> str:
    if edit.label is None:
        raise UsageError("per-label scoring needs labelled edits")
    return str(edit.label)


def per_label_score(match: MatchResult, beta: float = 0.5) -> dict[str, GecScore]:
    """Per-label P/R/F; a matched pair only counts as TP when both labels agree."""
    tp: Counter = Counter()
    fp: Counter = Counter()
    fn: Counter = Counter()
    for h, r in match.tp:
        lh, lr = _label_name(h), _label_name(r)
        if lh == lr:
            tp[lh] += 1
        else:
            fp[lh] += 1
            fn[lr] += 1
    for h in match.fp:
        fp[_label_name(h)] += 1
    for r in match.fn:
        fn[_label_name(r)] += 1
    labels = sorted(set(tp) | set(fp) | set(fn))
    return {lab: gec_score(tp[lab], fp[lab], fn[lab], beta) for lab in labels}


def label_histogram(
    edits: Iterable[Edit], top_n: int = 10, exclude_other: bool = False
) -> list[tuple[str, int]]:
    if top_n < 0:
        raise UsageError("top_n must be >= 0")
    counts = Counter(
        _label_name(e) for e in edits if not (exclude_other and e.label is not None and e.label.is_other)
    )
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_n]


# --------------------------------------------------------------------------
# corpus-level evaluation


@dataclass(frozen=True)
class GecEvaluation:
    score: GecScore
    per_label: dict[str, GecScore]
    hyp_edits: dict[str, list[Edit]]
    ref_edits: dict[str, list[Edit]]
    clamped: int
    shift: bool


def evaluate_gec(
    hyp_src,
    hyp_cor,
    ref_src,
    ref_cor,
    shift: bool = True,
    beta: float = 0.5,
    lex: Lexicon = DEFAULT_LEXICON,
) -> GecEvaluation:
    """Score hypothesis corrections against reference corrections, utterance by utterance.

    All four arguments are corpora keyed by the same utt_ids; hypothesis
    edits (hyp_src -> hyp_cor) are shifted onto ref_src before matching
    unless ``shift`` is off.
    """
    if beta <= 0:
        raise UsageError(f"beta must be positive, got {beta}")
    from spokengec.corpus_io import pair_corpora

    # validates that all four corpora share utt_ids
    pair_corpora(hyp_src, hyp_cor)
    pair_corpora(hyp_src, ref_src)
    pair_corpora(hyp_src, ref_cor)

    tp: list = []
    fp: list = []
    fn: list = []
    hyp_all: dict[str, list[Edit]] = {}
    ref_all: dict[str, list[Edit]] = {}
    clamped = 0
    for entry in hyp_src:
        utt_id = entry.utt_id
        hs, hc = entry.tokens, hyp_cor[utt_id].tokens
        rs, rc = ref_src[utt_id].tokens, ref_cor[utt_id].tokens
        hyp_edits = annotate(hs, hc, lex)
        ref_edits = annotate(rs, rc, lex)
        if shift:
            hyp_edits = shift_spans(hyp_edits, align(rs, hs))
            clamped += sum(e.clamped for e in hyp_edits)
        hyp_edits = sorted(hyp_edits, key=lambda e: (e.src_start, e.src_end))
        result = match_edits(hyp_edits, ref_edits)
        tp.extend(result.tp)
        fp.extend(result.fp)
        fn.extend(result.fn)
        hyp_all[utt_id] = hyp_edits
        ref_all[utt_id] = ref_edits
    pooled = MatchResult(tuple(tp), tuple(fp), tuple(fn))
    return GecEvaluation(
        gec_score(len(tp), len(fp), len(fn), beta),
        per_label_score(pooled, beta),
        hyp_all,
        ref_all,
        clamped,
        shift,
    )


# --------------------------------------------------------------------------
# M2-style files


def emit_m2(items: Iterable[tuple[Sequence[str], Sequence[Edit]]]) -> str:
    """``S`` source line followed by ``A start end|||label|||replacement`` lines."""
    blocks = []
    for src, edits in items:
        lines = ["S " + " ".join(src)]
        for e in edits:
            label = str(e.label) if e.label is not None else "UNK"
            lines.append(f"A {e.src_start} {e.src_end}|||{label}|||{' '.join(e.replacement)}")
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def parse_m2(text: str) -> list[tuple[tuple[str, ...], list[Edit]]]:
    items: list[tuple[tuple[str, ...], list[Edit]]] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        if line.startswith("S"):
            items.append((tuple(line[2:].split()), []))
        elif line.startswith("A "):
            if not items:
                raise DataError(f"m2 line {lineno}: edit before any source line")
            fields = line[2:].split("|||")
            if len(fields) < 3:
                raise DataError(f"m2 line {lineno}: expected span|||label|||replacement")
            try:
                start, end = (int(x) for x in fields[0].split())
            except ValueError:
                raise DataError(f"m2 line {lineno}: bad span {fields[0]!r}") from None
            if start < 0:
                # noop annotation
                continue
            label = None if fields[1] in ("UNK", "noop") else EditLabel.parse(fields[1])
            try:
                edit = Edit(start, end, tuple(fields[2].split()), label)
            except ValueError as exc:
                raise DataError(f"m2 line {lineno}: {exc}") from None
            items[-1][1].append(edit)
        else:
            raise DataError(f"m2 line {lineno}: unrecognised line")
    return items


def edits_to_dicts(edits: Sequence[Edit]) -> list[dict]:
    return [
        {
            "start": e.src_start,
            "end": e.src_end,
            "replacement": list(e.replacement),
            "label": None if e.label is None else str(e.label),
            "clamped": e.clamped,
        }
        for e in edits
    ]


def histogram_rows(hist: Sequence[tuple[str, int]]) -> list[dict]:
    return [{"label": lab, "count": n} for lab, n in hist]


def scores_to_dict(scores: Mapping[str, GecScore]) -> dict:
    return {lab: s.to_dict() for lab, s in scores.items()}
