"""Rule-based disfluency tagging/removal and deletion-based DD scoring."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from spokengec.alignment import DELETE, INSERT, align
from spokengec.corpus_io import Corpus, LabeledTranscript, Transcript, pair_corpora
from spokengec.errors import DataError, UsageError

DEFAULT_FILLERS = frozenset({"uh", "um", "uhm", "er", "uh-huh", "uh-hum", "mm"})
DEFAULT_PHRASE_FILLERS = frozenset({("you", "know"), ("i", "mean")})


@dataclass(frozen=True)
class DisfluencyRules:
    fillers: frozenset[str] = DEFAULT_FILLERS
    phrase_fillers: frozenset[tuple[str, str]] = DEFAULT_PHRASE_FILLERS
    max_repeat_span: int = 2
    use_fillers: bool = True
    use_phrase_fillers: bool = True
    use_repetitions: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "fillers", frozenset(self.fillers))
        object.__setattr__(self, "phrase_fillers", frozenset(tuple(p) for p in self.phrase_fillers))
        if self.use_fillers and not self.fillers:
            raise UsageError("filler rule enabled with an empty filler set")
        if self.use_phrase_fillers and not self.phrase_fillers:
            raise UsageError("phrase-filler rule enabled with an empty phrase set")
        if any(len(p) != 2 for p in self.phrase_fillers):
            raise UsageError("phrase fillers must be token bigrams")
        if self.max_repeat_span < 1:
            raise UsageError("max_repeat_span must be >= 1")

    @classmethod
    def from_config(cls, text: str) -> "DisfluencyRules":
        """Read ``key = value`` lines; lists are comma separated.

        Keys: fillers, phrase_fillers, max_repeat_span, use_fillers,
        use_phrase_fillers, use_repetitions.
        """
        kwargs: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"rules line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "fillers":
                kwargs[key] = frozenset(v.strip() for v in value.split(",") if v.strip())
            elif key == "phrase_fillers":
                kwargs[key] = frozenset(
                    tuple(v.split()) for v in value.split(",") if v.strip()
                )
            elif key == "max_repeat_span":
                try:
                    kwargs[key] = int(value)
                except ValueError:
                    raise UsageError(f"rules line {lineno}: max_repeat_span must be an integer")
            elif key in ("use_fillers", "use_phrase_fillers", "use_repetitions"):
                kwargs[key] = parse_bool(value, f"rules line {lineno}")
            else:
                raise UsageError(f"rules line {lineno}: unknown key {key!r}")
        return cls(**kwargs)


def parse_bool(value: str, where: str = "") -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"{where}: expected a boolean, got {value!r}".lstrip(": "))


DEFAULT_RULES = DisfluencyRules()


def tag_disfluencies(tokens: Sequence[str], rules: DisfluencyRules = DEFAULT_RULES) -> tuple[int, ...]:
    n = len(tokens)
    labels = [0] * n
    for i, tok in enumerate(tokens):
        if rules.use_fillers and tok in rules.fillers:
            labels[i] = 1
        if rules.use_phrase_fillers and i + 1 < n and (tok, tokens[i + 1]) in rules.phrase_fillers:
            labels[i] = labels[i + 1] = 1
        if rules.use_repetitions:
            # mark the earlier copy of an immediately repeated n-gram
            for span in range(1, rules.max_repeat_span + 1):
                if i + 2 * span > n:
                    break
                if tuple(tokens[i : i + span]) == tuple(tokens[i + span : i + 2 * span]):
                    for k in range(i, i + span):
                        labels[k] = 1
    return tuple(labels)


def remove_disfluencies(labeled: LabeledTranscript) -> Transcript:
    kept = tuple(t for t, flag in zip(labeled.tokens, labeled.labels) if flag == 0)
    return Transcript(labeled.utt_id, kept)


class Projection(NamedTuple):
    labeled: LabeledTranscript
    unprojected: int


def project_labels(gold: LabeledTranscript, hyp_dsf: Transcript) -> Projection:
    """Carry gold disfluency labels onto ASR tokens through their alignment.

    Matched and substituted hypothesis tokens inherit the gold flag; inserted
    tokens get 0; gold positives on deleted reference tokens are counted in
    ``unprojected``.
    """
    alignment = align(gold.tokens, hyp_dsf.tokens)
    labels = [0] * len(hyp_dsf.tokens)
    unprojected = 0
    for op in alignment.ops:
        if op.kind == DELETE:
            unprojected += gold.labels[op.ref_index]
        elif op.kind != INSERT:
            labels[op.hyp_index] = gold.labels[op.ref_index]
    return Projection(LabeledTranscript(hyp_dsf, tuple(labels)), unprojected)


def deletion_predictions(hyp_dsf: Transcript, hyp_flt: Transcript) -> tuple[int, ...]:
    """Flag the disfluent-transcript tokens that the fluent transcript dropped."""
    alignment = align(hyp_dsf.tokens, hyp_flt.tokens)
    pred = [0] * len(hyp_dsf.tokens)
    for op in alignment.ops:
        if op.kind == DELETE:
            pred[op.ref_index] = 1
    return tuple(pred)


MACRO = "macro"
MICRO = "micro"


@dataclass(frozen=True)
class DdScore:
    precision: float
    recall: float
    f1: float
    n_utts: int
    averaging: str
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def to_dict(self) -> dict:
        return {
            "precision": round(self.precision, 4),
            "recall": round(self.recall, 4),
            "f1": round(self.f1, 4),
            "n_utts": self.n_utts,
            "averaging": self.averaging,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


def prf(tp: int, fp: int, fn: int, beta: float = 1.0) -> tuple[float, float, float]:
    """Precision, recall and F-beta as percentages.

    A zero denominator scores 100 when the other side has no positives
    either (nothing to find, nothing claimed) and 0 otherwise.
    """
    if tp + fp > 0:
        p = 100.0 * tp / (tp + fp)
    else:
        p = 100.0 if tp + fn == 0 else 0.0
    if tp + fn > 0:
        r = 100.0 * tp / (tp + fn)
    else:
        r = 100.0 if tp + fp == 0 else 0.0
    return p, r, f_measure(p, r, beta)


def f_measure(p: float, r: float, beta: float) -> float:
    b2 = beta * beta
    denom = b2 * p + r
    return (1 + b2) * p * r / denom if denom > 0 else 0.0


def _counts(gold: Sequence[int], pred: Sequence[int]) -> tuple[int, int, int]:
    tp = sum(1 for g, p in zip(gold, pred) if g and p)
    fp = sum(1 for g, p in zip(gold, pred) if p and not g)
    fn = sum(1 for g, p in zip(gold, pred) if g and not p)
    return tp, fp, fn


def dd_score(
    gold: Mapping[str, Sequence[int]],
    pred: Mapping[str, Sequence[int]],
    averaging: str = MACRO,
) -> DdScore:
    if averaging not in (MACRO, MICRO):
        raise UsageError(f"averaging must be macro or micro, got {averaging!r}")
    missing = [u for u in gold if u not in pred] + [u for u in pred if u not in gold]
    if missing:
        raise DataError(f"utt_id mismatch between gold and predicted labels: {', '.join(missing[:10])}")

    per_utt = []
    for utt_id, g in gold.items():
        p = pred[utt_id]
        if len(g) != len(p):
            raise DataError(f"label length mismatch {utt_id}")
        per_utt.append(_counts(g, p))

    tp = sum(c[0] for c in per_utt)
    fp = sum(c[1] for c in per_utt)
    fn = sum(c[2] for c in per_utt)
    n = len(per_utt)
    if averaging == MICRO or n == 0:
        precision, recall, f1 = prf(tp, fp, fn)
    else:
        scores = [prf(*c) for c in per_utt]
        precision = sum(s[0] for s in scores) / n
        recall = sum(s[1] for s in scores) / n
        f1 = sum(s[2] for s in scores) / n
    return DdScore(precision, recall, f1, n, averaging, tp, fp, fn)


@dataclass(frozen=True)
class DdEvaluation:
    score: DdScore
    unprojected: int
    gold: dict[str, tuple[int, ...]]
    pred: dict[str, tuple[int, ...]]


def evaluate_deletions(
    gold_dsf: Corpus, hyp_dsf: Corpus, hyp_flt: Corpus, averaging: str = MACRO
) -> DdEvaluation:
    """Score the deletions hyp_dsf -> hyp_flt against manual labels projected onto hyp_dsf.

    ``gold_dsf`` must hold LabeledTranscript entries.
    """
    dsf_pairs = pair_corpora(hyp_dsf, gold_dsf)
    flt_pairs = pair_corpora(hyp_dsf, hyp_flt)
    gold: dict[str, tuple[int, ...]] = {}
    pred: dict[str, tuple[int, ...]] = {}
    unprojected = 0
    for (utt_id, hyp, _), (_, _, flt) in zip(dsf_pairs, flt_pairs):
        entry = gold_dsf[utt_id]
        if not isinstance(entry, LabeledTranscript):
            raise DataError(f"no gold labels for {utt_id}")
        projected = project_labels(entry, hyp)
        unprojected += projected.unprojected
        gold[utt_id] = projected.labeled.labels
        pred[utt_id] = deletion_predictions(hyp, flt)
    return DdEvaluation(dd_score(gold, pred, averaging), unprojected, gold, pred)
