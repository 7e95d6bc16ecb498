"""Embedded English lexicon used for error-type classification.

Closed word classes are listed explicitly; open-class inflections are
generated from base forms with regular spelling rules plus irregular tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

# verb form tags
BASE, THIRD_SG, PAST, PAST_PART, GERUND = "base", "3sg", "past", "pp", "ger"
SINGULAR, PLURAL = "sg", "pl"

_VOWELS = set("aeiou")


def _ends_sibilant(word: str) -> bool:
    return word.endswith(("s", "x", "z", "ch", "sh"))


def regular_plural(word: str) -> str:
    if _ends_sibilant(word):
        return word + "es"
    if len(word) > 1 and word.endswith("y") and word[-2] not in _VOWELS:
        return word[:-1] + "ies"
    return word + "s"


def regular_third_singular(verb: str) -> str:
    if _ends_sibilant(verb) or verb.endswith("o"):
        return verb + "es"
    if len(verb) > 1 and verb.endswith("y") and verb[-2] not in _VOWELS:
        return verb[:-1] + "ies"
    return verb + "s"


def regular_past(verb: str, doubles: bool = False) -> str:
    if verb.endswith("e"):
        return verb + "d"
    if len(verb) > 1 and verb.endswith("y") and verb[-2] not in _VOWELS:
        return verb[:-1] + "ied"
    if doubles:
        return verb + verb[-1] + "ed"
    return verb + "ed"


def regular_gerund(verb: str, doubles: bool = False) -> str:
    if verb.endswith("ie"):
        return verb[:-2] + "ying"
    if verb.endswith("e") and not verb.endswith(("ee", "ye", "oe")) and len(verb) > 2:
        return verb[:-1] + "ing"
    if doubles:
        return verb + verb[-1] + "ing"
    return verb + "ing"


DETERMINERS = frozenset(
    """a an the this that these those some any no every each another either neither
    several few both all my your his her its our their""".split()
)
PREPOSITIONS = frozenset(
    """in on at to for with about from of by into onto during after before since until
    through over under between among without within across along around behind near
    towards toward than as per upon""".split()
)
PRONOUNS = frozenset(
    """i you he she it we they me him us them myself yourself himself herself itself
    ourselves yourselves themselves mine yours hers ours theirs who whom whose what which
    someone something anyone anything everyone everything nobody nothing somebody anybody
    everybody""".split()
)
CONJUNCTIONS = frozenset(
    "and but or nor because if when while although though unless whereas whether".split()
)

# base -> (past, past participle, 3sg, gerund)
IRREGULAR_VERBS: dict[str, tuple[str, str, str, str]] = {
    "be": ("was", "been", "is", "being"),
    "have": ("had", "had", "has", "having"),
    "do": ("did", "done", "does", "doing"),
    "go": ("went", "gone", "goes", "going"),
    "come": ("came", "come", "comes", "coming"),
    "take": ("took", "taken", "takes", "taking"),
    "make": ("made", "made", "makes", "making"),
    "see": ("saw", "seen", "sees", "seeing"),
    "get": ("got", "got", "gets", "getting"),
    "give": ("gave", "given", "gives", "giving"),
    "buy": ("bought", "bought", "buys", "buying"),
    "eat": ("ate", "eaten", "eats", "eating"),
    "drink": ("drank", "drunk", "drinks", "drinking"),
    "write": ("wrote", "written", "writes", "writing"),
    "read": ("read", "read", "reads", "reading"),
    "speak": ("spoke", "spoken", "speaks", "speaking"),
    "run": ("ran", "run", "runs", "running"),
    "swim": ("swam", "swum", "swims", "swimming"),
    "begin": ("began", "begun", "begins", "beginning"),
    "bring": ("brought", "brought", "brings", "bringing"),
    "think": ("thought", "thought", "thinks", "thinking"),
    "teach": ("taught", "taught", "teaches", "teaching"),
    "find": ("found", "found", "finds", "finding"),
    "leave": ("left", "left", "leaves", "leaving"),
    "meet": ("met", "met", "meets", "meeting"),
    "pay": ("paid", "paid", "pays", "paying"),
    "sell": ("sold", "sold", "sells", "selling"),
    "send": ("sent", "sent", "sends", "sending"),
    "spend": ("spent", "spent", "spends", "spending"),
    "feel": ("felt", "felt", "feels", "feeling"),
    "keep": ("kept", "kept", "keeps", "keeping"),
    "sleep": ("slept", "slept", "sleeps", "sleeping"),
    "tell": ("told", "told", "tells", "telling"),
    "say": ("said", "said", "says", "saying"),
    "put": ("put", "put", "puts", "putting"),
    "choose": ("chose", "chosen", "chooses", "choosing"),
    "forget": ("forgot", "forgotten", "forgets", "forgetting"),
    "grow": ("grew", "grown", "grows", "growing"),
    "know": ("knew", "known", "knows", "knowing"),
    "mean": ("meant", "meant", "means", "meaning"),
    "become": ("became", "become", "becomes", "becoming"),
    "win": ("won", "won", "wins", "winning"),
    "lose": ("lost", "lost", "loses", "losing"),
    "hear": ("heard", "heard", "hears", "hearing"),
    "hold": ("held", "held", "holds", "holding"),
    "understand": ("understood", "understood", "understands", "understanding"),
    "sit": ("sat", "sat", "sits", "sitting"),
    "drive": ("drove", "driven", "drives", "driving"),
    "ride": ("rode", "ridden", "rides", "riding"),
    "fly": ("flew", "flown", "flies", "flying"),
    "break": ("broke", "broken", "breaks", "breaking"),
    "wear": ("wore", "worn", "wears", "wearing"),
    "catch": ("caught", "caught", "catches", "catching"),
    "build": ("built", "built", "builds", "building"),
    "cut": ("cut", "cut", "cuts", "cutting"),
    "let": ("let", "let", "lets", "letting"),
    "learn": ("learned", "learned", "learns", "learning"),
}

# form -> (lemma, tag) for forms the irregular table cannot hold
EXTRA_VERB_FORMS: dict[str, tuple[str, str]] = {
    "am": ("be", BASE),
    "are": ("be", BASE),
    "were": ("be", PAST),
    "learnt": ("learn", PAST),
}

REGULAR_VERBS = frozenset(
    """like love want need walk talk play work study cook watch visit help live start finish
    enjoy use travel attend hire open close clean call ask answer move stay try carry change
    decide prefer improve practise practice listen wait look arrive plan stop shop chat relax
    solve explain discuss share believe hope remember miss order rent join""".split()
)
# regular verbs that double their final consonant before -ed/-ing
DOUBLING_VERBS = frozenset("plan stop shop chat".split())

IRREGULAR_NOUNS: dict[str, str] = {
    "person": "people",
    "child": "children",
    "man": "men",
    "woman": "women",
    "foot": "feet",
    "tooth": "teeth",
    "mouse": "mice",
    "life": "lives",
    "knife": "knives",
    "wife": "wives",
    "potato": "potatoes",
    "tomato": "tomatoes",
}

NOUNS = frozenset(
    """book cat dog house city country friend family language problem product staff quality
    time day year job school teacher student car game movie film song sport park town hometown
    world place thing idea hobby holiday weekend restaurant way opinion lesson exam test company
    question computer phone dinner breakfast lunch food meal water money kitchen garden room
    street bus train plane ticket week month morning evening night brother sister mother father
    parent colleague customer countryside tree flower river beach mountain university office
    hour minute box church dish baby story party activity hotel museum picture letter present
    window table chair bag apple shirt work""".split()
) | frozenset(IRREGULAR_NOUNS)

ADJECTIVES = frozenset(
    """good bad big small easy difficult important interesting boring happy sad beautiful nice
    new old young expensive cheap different constant permanent better best worse worst popular
    busy quiet noisy hot cold long short high low large great early late hard friendly useful
    healthy strong fast slow free fresh famous modern simple possible real right wrong sure
    easier easiest bigger biggest smaller smallest""".split()
)
ADVERBS = frozenset(
    """very really quite too also always often usually sometimes never just much well here
    there now then soon already still again even only actually together so more most less
    least ever yet almost maybe perhaps""".split()
)


@dataclass(frozen=True)
class Lexicon:
    determiners: frozenset[str] = DETERMINERS
    prepositions: frozenset[str] = PREPOSITIONS
    pronouns: frozenset[str] = PRONOUNS
    conjunctions: frozenset[str] = CONJUNCTIONS
    irregular_verbs: Mapping[str, tuple[str, str, str, str]] = field(
        default_factory=lambda: dict(IRREGULAR_VERBS)
    )
    irregular_nouns: Mapping[str, str] = field(default_factory=lambda: dict(IRREGULAR_NOUNS))
    regular_verbs: frozenset[str] = REGULAR_VERBS
    doubling_verbs: frozenset[str] = DOUBLING_VERBS
    extra_verb_forms: Mapping[str, tuple[str, str]] = field(
        default_factory=lambda: dict(EXTRA_VERB_FORMS)
    )
    nouns: frozenset[str] = NOUNS
    adjectives: frozenset[str] = ADJECTIVES
    adverbs: frozenset[str] = ADVERBS

    def __post_init__(self) -> None:
        closed = {
            "determiners": self.determiners,
            "prepositions": self.prepositions,
            "pronouns": self.pronouns,
            "conjunctions": self.conjunctions,
        }
        names = sorted(closed)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                overlap = closed[a] & closed[b]
                if overlap:
                    raise ValueError(f"closed sets {a} and {b} overlap: {sorted(overlap)}")

    def closed_class(self, token: str) -> str | None:
        if token in self.determiners:
            return "DET"
        if token in self.prepositions:
            return "PREP"
        if token in self.pronouns:
            return "PRON"
        if token in self.conjunctions:
            return "CONJ"
        return None

    @property
    def verb_lemmas(self) -> frozenset[str]:
        return self.regular_verbs | frozenset(self.irregular_verbs)

    def verb_forms(self, lemma: str) -> dict[str, str]:
        """All inflections of a verb lemma, keyed by form tag."""
        if lemma in self.irregular_verbs:
            past, pp, third, ger = self.irregular_verbs[lemma]
        else:
            doubles = lemma in self.doubling_verbs
            past = pp = regular_past(lemma, doubles)
            third = regular_third_singular(lemma)
            ger = regular_gerund(lemma, doubles)
        return {BASE: lemma, THIRD_SG: third, PAST: past, PAST_PART: pp, GERUND: ger}

    def plural(self, noun: str) -> str:
        return self.irregular_nouns.get(noun, regular_plural(noun))

    @cached_property
    def _verb_index(self) -> dict[str, frozenset[tuple[str, str]]]:
        index: dict[str, set[tuple[str, str]]] = {}
        for lemma in self.verb_lemmas:
            for tag, form in self.verb_forms(lemma).items():
                index.setdefault(form, set()).add((lemma, tag))
        for form, analysis in self.extra_verb_forms.items():
            index.setdefault(form, set()).add(analysis)
        return {form: frozenset(a) for form, a in index.items()}

    @cached_property
    def _noun_index(self) -> dict[str, frozenset[tuple[str, str]]]:
        index: dict[str, set[tuple[str, str]]] = {}
        for lemma in self.nouns:
            index.setdefault(lemma, set()).add((lemma, SINGULAR))
            index.setdefault(self.plural(lemma), set()).add((lemma, PLURAL))
        return {form: frozenset(a) for form, a in index.items()}

    def verb_analyses(self, token: str) -> frozenset[tuple[str, str]]:
        """(lemma, form tag) readings of ``token`` as a verb; empty if unknown."""
        return self._verb_index.get(token, frozenset())

    def noun_analyses(self, token: str) -> frozenset[tuple[str, str]]:
        return self._noun_index.get(token, frozenset())

    def is_verb(self, token: str) -> bool:
        return bool(self.verb_analyses(token))

    def is_noun(self, token: str) -> bool:
        return bool(self.noun_analyses(token))

    def is_adjective(self, token: str) -> bool:
        if token in self.adjectives:
            return True
        # comparative/superlative of a listed adjective
        for suffix in ("er", "est"):
            if token.endswith(suffix) and len(token) > len(suffix) + 2:
                stem = token[: -len(suffix)]
                candidates = {stem, stem + "e"}
                if stem.endswith("i"):
                    candidates.add(stem[:-1] + "y")
                if len(stem) > 2 and stem[-1] == stem[-2]:
                    candidates.add(stem[:-1])
                if candidates & self.adjectives:
                    return True
        return False

    def is_adverb(self, token: str) -> bool:
        return token in self.adverbs or (token.endswith("ly") and len(token) > 4)


DEFAULT_LEXICON = Lexicon()
