"""Transcript and label TSV formats, corpus containers, and a synthetic corpus generator.

A transcript file holds one utterance per line::

    <utt_id>\\t<token> <token> ...

and a label file holds one binary disfluency flag per token::

    <utt_id>\\t<flag> <flag> ...
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from spokengec.errors import DataError, UsageError
from spokengec.lexicon import DEFAULT_LEXICON, GERUND, PAST, THIRD_SG, Lexicon


@dataclass(frozen=True)
class Transcript:
    utt_id: str
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.utt_id or any(c.isspace() for c in self.utt_id):
            raise DataError(f"invalid utt_id {self.utt_id!r}")
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok):
                raise DataError(f"whitespace-bearing or empty token in {self.utt_id}: {tok!r}")
            if tok != tok.lower():
                raise DataError(f"uppercase token in {self.utt_id}: {tok!r}")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class LabeledTranscript:
    transcript: Transcript
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.transcript.tokens):
            raise DataError(f"label count mismatch {self.transcript.utt_id}")
        if any(flag not in (0, 1) for flag in self.labels):
            raise DataError(f"invalid flag in {self.transcript.utt_id}")

    @property
    def utt_id(self) -> str:
        return self.transcript.utt_id

    @property
    def tokens(self) -> tuple[str, ...]:
        return self.transcript.tokens


Entry = Union[Transcript, LabeledTranscript]


@dataclass(frozen=True)
class Corpus:
    """Ordered utterances keyed by utt_id."""

    entries: tuple[Entry, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        index: dict[str, Entry] = {}
        for entry in entries:
            if entry.utt_id in index:
                raise DataError(f"duplicate utt_id {entry.utt_id}")
            index[entry.utt_id] = entry
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Entry]:
        return iter(self.entries)

    def __contains__(self, utt_id: object) -> bool:
        return utt_id in self._index

    def __getitem__(self, utt_id: str) -> Entry:
        return self._index[utt_id]

    def ids(self) -> list[str]:
        return [e.utt_id for e in self.entries]

    def transcripts(self) -> "Corpus":
        """The same corpus with labels stripped."""
        return Corpus(tuple(_as_transcript(e) for e in self.entries))


def _as_transcript(entry: Entry) -> Transcript:
    return entry.transcript if isinstance(entry, LabeledTranscript) else entry


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[tuple[str, Transcript, Transcript], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen = set()
        for utt_id, a, b in self.pairs:
            if utt_id in seen:
                raise DataError(f"duplicate utt_id {utt_id}")
            seen.add(utt_id)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def _split_line(line: str, lineno: int) -> tuple[str, list[str]]:
    if "\t" not in line:
        raise DataError(f"line {lineno}: missing tab separator")
    utt_id, _, rest = line.partition("\t")
    return utt_id, (rest.split(" ") if rest else [])


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.strip():
            yield lineno, line


def parse_transcript_file(text: str) -> Corpus:
    entries = []
    seen = set()
    for lineno, line in _lines(text):
        utt_id, tokens = _split_line(line, lineno)
        if utt_id in seen:
            raise DataError(f"duplicate utt_id {utt_id}")
        seen.add(utt_id)
        try:
            entries.append(Transcript(utt_id, tuple(tokens)))
        except DataError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
    return Corpus(tuple(entries))


def parse_label_file(text: str, corpus: Corpus) -> Corpus:
    """Attach disfluency flags to every transcript in ``corpus``."""
    labels: dict[str, tuple[int, ...]] = {}
    for lineno, line in _lines(text):
        utt_id, flags = _split_line(line, lineno)
        if utt_id in labels:
            raise DataError(f"duplicate utt_id {utt_id}")
        if any(f not in ("0", "1") for f in flags):
            raise DataError(f"line {lineno}: invalid flag in {utt_id}")
        if utt_id not in corpus:
            raise DataError(f"line {lineno}: unknown utt_id {utt_id}")
        labels[utt_id] = tuple(int(f) for f in flags)

    out = []
    for entry in corpus:
        if entry.utt_id not in labels:
            raise DataError(f"no labels for utt_id {entry.utt_id}")
        out.append(LabeledTranscript(_as_transcript(entry), labels[entry.utt_id]))
    return Corpus(tuple(out))


def pair_corpora(a: Corpus, b: Corpus) -> ParallelCorpus:
    only_a = [i for i in a.ids() if i not in b]
    only_b = [i for i in b.ids() if i not in a]
    if only_a or only_b:
        missing = (only_a + only_b)[:10]
        raise DataError(f"utt_id mismatch between corpora: {', '.join(missing)}")
    return ParallelCorpus(
        tuple((e.utt_id, _as_transcript(e), _as_transcript(b[e.utt_id])) for e in a)
    )


def emit_transcripts(corpus: Iterable[Entry]) -> str:
    return "".join(f"{e.utt_id}\t{' '.join(e.tokens)}\n" for e in corpus)


def emit_labels(corpus: Iterable[LabeledTranscript]) -> str:
    return "".join(
        f"{e.utt_id}\t{' '.join(str(f) for f in e.labels)}\n" for e in corpus
    )


def label_map(corpus: Corpus) -> dict[str, tuple[int, ...]]:
    return {e.utt_id: e.labels for e in corpus}


# --------------------------------------------------------------------------
# synthetic corpora

DEFAULT_NOUNS = (
    "book", "cat", "dog", "house", "city", "friend", "teacher", "student", "car", "game",
    "movie", "song", "park", "restaurant", "lesson", "exam", "computer", "phone", "dinner",
    "garden", "ticket", "river", "beach", "mountain", "museum", "picture", "letter", "bag",
    "apple", "shirt", "child", "person", "party", "story", "hotel", "box",
)
# verbs that take a noun-phrase object and never double as a noun in DEFAULT_NOUNS
_SYNTH_VERBS = (
    "like", "love", "want", "need", "visit", "cook", "watch", "clean", "buy", "see", "find",
    "bring", "take", "make", "read", "write", "sell", "choose", "enjoy", "carry", "keep",
)
_INFINITIVE_VERBS = ("go", "eat", "swim", "travel", "relax", "study", "sleep", "walk", "play")
_SUBJECT_PRONOUNS = ("i", "he", "she", "we", "they")
_SG_DETS = ("the", "a", "this", "that", "my", "his", "her", "our")
_PREPOSITIONS = ("in", "on", "at", "near", "with", "for", "from")

GRAMMAR_LABELS = (
    "M:DET", "U:DET", "R:DET", "R:PREP", "R:NOUN:NUM", "R:NOUN",
    "R:VERB", "R:VERB:TENSE", "R:VERB:SVA", "R:VERB:FORM",
)


@dataclass(frozen=True)
class SynthParams:
    filler_rate: float = 0.1
    repetition_rate: float = 0.05
    grammar_error_rate: float = 0.2
    phrase_filler_share: float = 0.2
    vocabulary: tuple[str, ...] = DEFAULT_NOUNS
    fillers: tuple[str, ...] = ("uh", "um", "uhm", "er", "mm")
    phrase_fillers: tuple[tuple[str, str], ...] = (("you", "know"), ("i", "mean"))

    def validate(self, lex: Lexicon) -> None:
        for name in ("filler_rate", "repetition_rate", "grammar_error_rate", "phrase_filler_share"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise UsageError(f"{name} must lie in [0, 1], got {value}")
        banned = set(self.fillers) | lex.determiners | lex.prepositions | lex.pronouns
        for word in self.vocabulary:
            if word in banned or not word or word != word.lower() or " " in word:
                raise UsageError(f"vocabulary word {word!r} is not an open-class noun")


@dataclass(frozen=True)
class SynthCorpus:
    """Three aligned views of the same synthetic utterances.

    ``injected`` records, per utterance, the error label of every grammar
    error written into ``flt`` (the learner side of the flt -> gec edit).
    """

    dsf: Corpus
    flt: Corpus
    gec: Corpus
    injected: dict[str, tuple[str, ...]]

    def __iter__(self):
        return iter((self.dsf, self.flt, self.gec))


class _Slot:
    __slots__ = ("token", "kind", "info")

    def __init__(self, token: str, kind: str, info: dict | None = None):
        self.token = token
        self.kind = kind
        self.info = info or {}


def _noun_phrase(rng: random.Random, params: SynthParams, lex: Lexicon, allow_bare: bool):
    noun = rng.choice(params.vocabulary)
    if allow_bare and rng.random() < 0.3:
        return [_Slot(lex.plural(noun), "noun", {"lemma": noun, "plural": True, "bare": True})]
    if rng.random() < 0.25:
        det = rng.choice(("the", "these", "some", "my", "our"))
        return [
            _Slot(det, "det", {"plural": True}),
            _Slot(lex.plural(noun), "noun", {"lemma": noun, "plural": True}),
        ]
    det = rng.choice(_SG_DETS)
    if det == "a" and noun[0] in "aeiou":
        det = "an"
    return [_Slot(det, "det", {"plural": False}), _Slot(noun, "noun", {"lemma": noun, "plural": False})]


def _sentence(rng: random.Random, params: SynthParams, lex: Lexicon) -> list[_Slot]:
    slots: list[_Slot] = []
    if rng.random() < 0.5:
        pron = rng.choice(_SUBJECT_PRONOUNS)
        slots.append(_Slot(pron, "subj"))
        third = pron in ("he", "she")
    else:
        np = _noun_phrase(rng, params, lex, allow_bare=False)
        slots.extend(np)
        third = not np[-1].info["plural"]
    past = rng.random() < 0.4
    if rng.random() < 0.3:
        # <like/want> to <verb> construction
        head = rng.choice(("like", "want", "love", "need"))
        forms = lex.verb_forms(head)
        tag = PAST if past else (THIRD_SG if third else "base")
        slots.append(_Slot(forms[tag], "verb", {"lemma": head, "tag": tag}))
        slots.append(_Slot("to", "to"))
        slots.append(_Slot(rng.choice(_INFINITIVE_VERBS), "inf"))
    else:
        lemma = rng.choice(_SYNTH_VERBS)
        forms = lex.verb_forms(lemma)
        tag = PAST if past else (THIRD_SG if third else "base")
        slots.append(_Slot(forms[tag], "verb", {"lemma": lemma, "tag": tag}))
        slots.extend(_noun_phrase(rng, params, lex, allow_bare=True))
    if rng.random() < 0.6:
        slots.append(_Slot(rng.choice(_PREPOSITIONS), "prep"))
        slots.extend(_noun_phrase(rng, params, lex, allow_bare=False))
    return slots


def _error_options(slots: list[_Slot], i: int, params: SynthParams, lex: Lexicon):
    """Candidate (label, replacement-or-None) corruptions of slot ``i``.

    A replacement of ``None`` deletes the slot; the U:DET option is returned
    as ("U:DET", "+the") meaning insert ``the`` before the slot.
    """
    slot = slots[i]
    opts = []
    if slot.kind == "det":
        opts.append(("M:DET", None))
        alts = [d for d in ("the", "a", "this", "these", "that", "those") if d != slot.token]
        opts.append(("R:DET", alts))
    elif slot.kind == "prep":
        opts.append(("R:PREP", [p for p in _PREPOSITIONS if p != slot.token]))
    elif slot.kind == "noun":
        lemma = slot.info["lemma"]
        other = lemma if slot.info["plural"] else lex.plural(lemma)
        opts.append(("R:NOUN:NUM", [other]))
        nouns = [n for n in params.vocabulary if n != lemma]
        if nouns:
            opts.append(("R:NOUN", [n if not slot.info["plural"] else lex.plural(n) for n in nouns]))
        if slot.info.get("bare"):
            opts.append(("U:DET", "+the"))
    elif slot.kind == "verb":
        lemma, tag = slot.info["lemma"], slot.info["tag"]
        forms = lex.verb_forms(lemma)
        if tag == PAST:
            opts.append(("R:VERB:TENSE", [forms["base"]]))
        elif tag == THIRD_SG:
            opts.append(("R:VERB:SVA", [forms["base"]]))
        else:
            opts.append(("R:VERB:SVA", [forms[THIRD_SG]]))
            opts.append(("R:VERB:TENSE", [forms[PAST]]))
        others = [v for v in _SYNTH_VERBS if v != lemma]
        opts.append(("R:VERB", [lex.verb_forms(v)[tag] for v in others]))
    elif slot.kind == "inf":
        opts.append(("R:VERB:FORM", [lex.verb_forms(slot.token)[GERUND]]))
    return opts


def _inject_grammar_errors(slots, rng, params, lex):
    """Return (learner tokens, injected labels) for the corrected sentence ``slots``."""
    touched: set[int] = set()
    actions: dict[int, tuple[str, object]] = {}
    for i in range(len(slots)):
        if i in touched or (i - 1) in touched:
            continue
        opts = _error_options(slots, i, params, lex)
        if not opts or rng.random() >= params.grammar_error_rate:
            continue
        label, choice = opts[rng.randrange(len(opts))]
        if choice == "+the" and i > 0 and (i - 1) in touched:
            continue
        if isinstance(choice, list):
            choice = [c for c in choice if c != slots[i].token]
            if not choice:
                continue
            choice = rng.choice(choice)
        actions[i] = (label, choice)
        touched.add(i)
        if choice is None or choice == "+the":
            # keep both neighbours clean so the edit cannot merge
            touched.add(i + 1)

    tokens: list[str] = []
    labels: list[str] = []
    for i, slot in enumerate(slots):
        if i in actions:
            label, choice = actions[i]
            labels.append(label)
            if choice is None:
                continue
            if choice == "+the":
                tokens.extend(("the", slot.token))
                continue
            tokens.append(choice)
        else:
            tokens.append(slot.token)
    return tokens, labels


def _bigram_copy_is_unambiguous(tokens: Sequence[str], i: int) -> bool:
    # copying tokens[i:i+2] in front of itself must not create a second,
    # overlapping bigram repeat with the neighbours
    if i > 0 and tokens[i - 1] == tokens[i + 1]:
        return False
    if i + 2 < len(tokens) and tokens[i] == tokens[i + 2]:
        return False
    return True


def _inject_disfluencies(tokens: Sequence[str], rng: random.Random, params: SynthParams):
    out: list[str] = []
    labels: list[int] = []
    skip_until = 0
    for i, tok in enumerate(tokens):
        if i >= skip_until:
            r = rng.random()
            if r < params.filler_rate:
                if params.phrase_fillers and rng.random() < params.phrase_filler_share:
                    phrase = tuple(rng.choice(params.phrase_fillers))
                else:
                    phrase = (rng.choice(params.fillers),)
                # "i" + "i mean" would read as a repetition of "i"
                prev = out[-1] if out else None
                if phrase[0] != prev and phrase[-1] != tok:
                    out.extend(phrase)
                    labels.extend([1] * len(phrase))
            elif r < params.filler_rate + params.repetition_rate:
                n = 2 if (i + 1 < len(tokens) and rng.random() < 0.4) else 1
                if n == 2 and not _bigram_copy_is_unambiguous(tokens, i):
                    n = 1
                out.extend(tokens[i : i + n])
                labels.extend([1] * n)
                skip_until = i + n
        out.append(tok)
        labels.append(0)
    return out, labels


def _clean_fluent(tokens: Sequence[str], params: SynthParams) -> bool:
    """No accidental immediate repeats or phrase fillers in the fluent text."""
    for n in (1, 2):
        for i in range(len(tokens) - 2 * n + 1):
            if tuple(tokens[i : i + n]) == tuple(tokens[i + n : i + 2 * n]):
                return False
    bigrams = set(zip(tokens, tokens[1:]))
    return not bigrams & set(params.phrase_fillers)


_MAX_DSF_TRIES = 50


def synth_corpus(
    seed: int, n_utts: int, params: SynthParams | None = None, lex: Lexicon = DEFAULT_LEXICON
) -> SynthCorpus:
    """Generate ``n_utts`` deterministic (dsf, flt, gec) utterance triples.

    gec holds template-grammar sentences, flt the same sentences with
    grammar errors injected, dsf the flt tokens with fillers and repetitions
    inserted and labelled 1.
    """
    params = params or SynthParams()
    if n_utts < 0:
        raise UsageError("n_utts must be non-negative")
    if n_utts > 0 and not params.vocabulary:
        raise UsageError("synthetic corpus needs a non-empty vocabulary")
    params.validate(lex)

    from spokengec.disfluency import DisfluencyRules, tag_disfluencies

    # overlapping injections can read as a different disfluency, e.g. a
    # phrase filler starting with the word just repeated; redraw those
    rules = DisfluencyRules(
        fillers=params.fillers,
        phrase_fillers=params.phrase_fillers,
        use_fillers=bool(params.fillers),
        use_phrase_fillers=bool(params.phrase_fillers),
    )
    rng = random.Random(seed)
    width = max(4, len(str(n_utts)))
    dsf, flt, gec = [], [], []
    injected: dict[str, tuple[str, ...]] = {}
    for k in range(n_utts):
        utt_id = f"utt{k:0{width}d}"
        while True:
            slots = _sentence(rng, params, lex)
            learner, labels = _inject_grammar_errors(slots, rng, params, lex)
            corrected = [s.token for s in slots]
            if _clean_fluent(learner, params) and _clean_fluent(corrected, params):
                break
        for _ in range(_MAX_DSF_TRIES):
            dsf_tokens, flags = _inject_disfluencies(learner, rng, params)
            if tag_disfluencies(dsf_tokens, rules) == tuple(flags):
                break
        else:
            dsf_tokens, flags = list(learner), [0] * len(learner)
        gec.append(Transcript(utt_id, tuple(corrected)))
        flt.append(Transcript(utt_id, tuple(learner)))
        dsf.append(LabeledTranscript(Transcript(utt_id, tuple(dsf_tokens)), tuple(flags)))
        injected[utt_id] = tuple(labels)
    return SynthCorpus(Corpus(tuple(dsf)), Corpus(tuple(flt)), Corpus(tuple(gec)), injected)
