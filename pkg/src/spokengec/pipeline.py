"""Cascaded / end-to-end evaluation driven by one flat configuration file.

Config lines are ``dotted.key = value``; relative paths resolve against the
config file's directory::

    asr.dsf = hyp/dsf.tsv          # system transcripts (any subset)
    asr.flt = hyp/flt.tsv
    asr.gec = hyp/gec.tsv
    dd.mode = rules                # rules | labels | skip
    dd.rules = rules.cfg           # optional, rules mode
    dd.labels = hyp/dsf.labels     # labels mode: flags over asr.dsf tokens
    gec.mode = corrections         # corrections | skip
    gec.corrections = hyp/cascade_gec.tsv
    references.dsf = ref/dsf.tsv
    references.labels = ref/dsf.labels
    references.flt = ref/flt.tsv
    references.gec = ref/gec.tsv
    scoring.averaging = macro,micro
    scoring.beta = 0.5
    scoring.top_n = 10
    scoring.shift = true
    scoring.include_other = false
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from spokengec import __version__
from spokengec.alignment import corpus_wer
from spokengec.corpus_io import (
    Corpus,
    LabeledTranscript,
    pair_corpora,
    parse_label_file,
    parse_transcript_file,
)
from spokengec.disfluency import (
    DEFAULT_RULES,
    MACRO,
    MICRO,
    DisfluencyRules,
    evaluate_deletions,
    parse_bool,
    remove_disfluencies,
    tag_disfluencies,
)
from spokengec.errors import DataError, UsageError
from spokengec.gec_edits import evaluate_gec, histogram_rows, label_histogram, scores_to_dict
from spokengec.ter import corpus_ter

PATH_KEYS = (
    "asr.dsf",
    "asr.flt",
    "asr.gec",
    "dd.rules",
    "dd.labels",
    "gec.corrections",
    "references.dsf",
    "references.labels",
    "references.flt",
    "references.gec",
)
OTHER_KEYS = (
    "dd.mode",
    "gec.mode",
    "scoring.averaging",
    "scoring.beta",
    "scoring.top_n",
    "scoring.shift",
    "scoring.include_other",
    "scoring.threads",
)
REFERENCE_VIEWS = ("dsf", "flt", "gec")


@dataclass(frozen=True)
class PipelineConfig:
    paths: dict[str, Path] = field(default_factory=dict)
    dd_mode: str = "rules"
    gec_mode: str = "corrections"
    averaging: tuple[str, ...] = (MACRO, MICRO)
    beta: float = 0.5
    top_n: int = 10
    shift: bool = True
    include_other: bool = False
    threads: int = 1
    echo: dict[str, str] = field(default_factory=dict)

    def path(self, key: str) -> Optional[Path]:
        return self.paths.get(key)

    @classmethod
    def from_text(cls, text: str, base_dir: Path | str = ".") -> "PipelineConfig":
        base = Path(base_dir)
        raw: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in PATH_KEYS and key not in OTHER_KEYS:
                raise UsageError(f"config line {lineno}: unknown key {key!r}")
            if key in raw:
                raise UsageError(f"config line {lineno}: duplicate key {key!r}")
            raw[key] = value

        paths = {k: base / raw[k] for k in PATH_KEYS if raw.get(k)}
        kwargs: dict = {"paths": paths, "echo": dict(sorted(raw.items()))}
        if "dd.mode" in raw:
            kwargs["dd_mode"] = raw["dd.mode"]
        elif "dd.labels" in raw:
            kwargs["dd_mode"] = "labels"
        if "gec.mode" in raw:
            kwargs["gec_mode"] = raw["gec.mode"]
        elif "gec.corrections" not in raw:
            kwargs["gec_mode"] = "skip"
        if "scoring.averaging" in raw:
            kwargs["averaging"] = tuple(
                a.strip() for a in raw["scoring.averaging"].split(",") if a.strip()
            )
        try:
            if "scoring.beta" in raw:
                kwargs["beta"] = float(raw["scoring.beta"])
            if "scoring.top_n" in raw:
                kwargs["top_n"] = int(raw["scoring.top_n"])
            if "scoring.threads" in raw:
                kwargs["threads"] = int(raw["scoring.threads"])
        except ValueError as exc:
            raise UsageError(f"config: {exc}") from None
        if "scoring.shift" in raw:
            kwargs["shift"] = parse_bool(raw["scoring.shift"], "scoring.shift")
        if "scoring.include_other" in raw:
            kwargs["include_other"] = parse_bool(raw["scoring.include_other"], "scoring.include_other")
        config = cls(**kwargs)
        config.validate()
        return config

    @classmethod
    def from_file(cls, path: Path | str) -> "PipelineConfig":
        path = Path(path)
        return cls.from_text(read_text(path), path.parent)

    def validate(self) -> None:
        if self.dd_mode not in ("rules", "labels", "skip"):
            raise UsageError(f"dd.mode must be rules, labels or skip, got {self.dd_mode!r}")
        if self.gec_mode not in ("corrections", "skip"):
            raise UsageError(f"gec.mode must be corrections or skip, got {self.gec_mode!r}")
        if self.dd_mode == "labels" and "dd.labels" not in self.paths:
            raise UsageError("dd.mode = labels requires dd.labels")
        if self.gec_mode == "corrections" and "gec.corrections" not in self.paths:
            raise UsageError("gec.mode = corrections requires gec.corrections")
        if self.gec_mode == "corrections" and self.dd_mode == "skip":
            raise UsageError("gec.corrections needs the dd stage to produce the cascade source")
        if (self.dd_mode != "skip") and "asr.dsf" not in self.paths:
            raise UsageError(f"dd.mode = {self.dd_mode} requires asr.dsf")
        if "references.labels" in self.paths and "references.dsf" not in self.paths:
            raise UsageError("references.labels requires references.dsf")
        for mode in self.averaging:
            if mode not in (MACRO, MICRO):
                raise UsageError(f"scoring.averaging: unknown mode {mode!r}")
        if not self.averaging:
            raise UsageError("scoring.averaging must name at least one mode")
        if self.beta <= 0:
            raise UsageError("scoring.beta must be positive")
        if self.top_n < 0:
            raise UsageError("scoring.top_n must be >= 0")
        has_system = any(k in self.paths for k in ("asr.dsf", "asr.flt", "asr.gec"))
        has_ref = any(f"references.{v}" in self.paths for v in REFERENCE_VIEWS)
        if not (has_system and has_ref):
            raise UsageError("config enables no evaluation: need at least one asr.* and one references.* path")


def read_text(path: Path | str) -> str:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    except IsADirectoryError:
        raise DataError(f"is a directory: {path}") from None
    except UnicodeDecodeError:
        raise DataError(f"not UTF-8: {path}") from None


def load_transcripts(path: Path | str) -> Corpus:
    text = read_text(path)
    try:
        return parse_transcript_file(text)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def load_labels(path: Path | str, corpus: Corpus) -> Corpus:
    text = read_text(path)
    try:
        return parse_label_file(text, corpus)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class CascadeOutput:
    flt: Corpus
    gec: Corpus
    gec_passthrough: bool


def cascade(
    dsf_hyp: Corpus,
    rules: DisfluencyRules = DEFAULT_RULES,
    corrections: Optional[Corpus] = None,
    labels: Optional[Corpus] = None,
) -> CascadeOutput:
    """ASR output -> disfluency removal -> (file-backed) GEC.

    Disfluencies come from ``labels`` when given (a labelled copy of
    ``dsf_hyp``), otherwise from the rule tagger.
    """
    flt = []
    for entry in dsf_hyp:
        if labels is not None:
            if entry.utt_id not in labels:
                raise DataError(f"no DD labels for utt_id {entry.utt_id}")
            tagged = labels[entry.utt_id]
            if not isinstance(tagged, LabeledTranscript) or tagged.tokens != entry.tokens:
                raise DataError(f"DD labels do not cover the ASR tokens of {entry.utt_id}")
        else:
            tagged = LabeledTranscript(entry, tag_disfluencies(entry.tokens, rules))
        flt.append(remove_disfluencies(tagged))
    flt_corpus = Corpus(tuple(flt))
    if corrections is None:
        return CascadeOutput(flt_corpus, flt_corpus, True)
    missing = [u for u in flt_corpus.ids() if u not in corrections]
    if missing:
        raise DataError(f"corrections missing utt_id: {', '.join(missing[:10])}")
    gec = Corpus(tuple(corrections[u] for u in flt_corpus.ids()))
    return CascadeOutput(flt_corpus, gec, False)


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _gec_block(ev, top_n, include_other) -> dict:
    hyp_edits = [e for edits in ev.hyp_edits.values() for e in edits]
    return {
        "score": ev.score.to_dict(),
        "per_label": scores_to_dict(ev.per_label),
        "histogram": histogram_rows(label_histogram(hyp_edits, top_n, not include_other)),
        "clamped_edits": ev.clamped,
        "shift": ev.shift,
    }


def run_pipeline(config: PipelineConfig) -> dict:
    """Run every evaluation the config makes possible; returns the report body."""
    for key, path in sorted(config.paths.items()):
        if not path.is_file():
            raise DataError(f"{key}: no such file: {path}")

    systems: dict[str, Corpus] = {}
    for view in REFERENCE_VIEWS:
        p = config.path(f"asr.{view}")
        if p is not None:
            systems[f"asr_{view}"] = load_transcripts(p)
    refs: dict[str, Corpus] = {}
    for view in REFERENCE_VIEWS:
        p = config.path(f"references.{view}")
        if p is not None:
            refs[view] = load_transcripts(p)
    gold_dsf = None
    if config.path("references.labels") is not None:
        gold_dsf = load_labels(config.path("references.labels"), refs["dsf"])

    stages: dict[str, object] = {}
    if config.dd_mode != "skip":
        dsf = systems["asr_dsf"]
        dd_labels = None
        rules = DEFAULT_RULES
        if config.dd_mode == "labels":
            dd_labels = load_labels(config.path("dd.labels"), dsf)
        elif config.path("dd.rules") is not None:
            rules = DisfluencyRules.from_config(read_text(config.path("dd.rules")))
        corrections = None
        if config.gec_mode == "corrections":
            corrections = load_transcripts(config.path("gec.corrections"))
        out = cascade(dsf, rules, corrections, dd_labels)
        systems["cascade_flt"] = out.flt
        stages["dd"] = config.dd_mode
        stages["gec"] = "passthrough" if out.gec_passthrough else "corrections"
        if not out.gec_passthrough:
            systems["cascade_gec"] = out.gec

    body: dict = {
        "provenance": {
            "config": config.echo,
            "inputs": {k: _digest(p) for k, p in sorted(config.paths.items())},
            "tool": "spokengec",
            "version": __version__,
        },
        "stages": stages,
        "systems": sorted(systems),
        "references": sorted(refs),
    }

    grid = {}
    for name, hyp in systems.items():
        grid[name] = {
            view: corpus_wer(pair_corpora(ref, hyp), config.threads).to_dict()
            for view, ref in refs.items()
        }
    body["wer_grid"] = grid

    if "asr_dsf" in systems:
        body["wer_vs_asr_dsf"] = {
            name: corpus_wer(pair_corpora(systems["asr_dsf"], systems[name]), config.threads).to_dict()
            for name in ("asr_flt", "cascade_flt")
            if name in systems
        }

    if "gec" in refs:
        body["ter_vs_gec"] = {
            name: corpus_ter(pair_corpora(refs["gec"], hyp), config.threads).to_dict()
            for name, hyp in systems.items()
        }

    if gold_dsf is not None and "asr_dsf" in systems:
        dd = {}
        for name in ("asr_flt", "cascade_flt"):
            if name not in systems:
                continue
            block = {}
            for mode in config.averaging:
                ev = evaluate_deletions(gold_dsf, systems["asr_dsf"], systems[name], mode)
                block[mode] = ev.score.to_dict()
                block["unprojected"] = ev.unprojected
            dd[name] = block
        body["dd"] = dd

    if "flt" in refs and "gec" in refs:
        gec = {}
        for name, source in (("asr_gec", "asr_flt"), ("cascade_gec", "cascade_flt")):
            if name not in systems or source not in systems:
                continue
            ev = evaluate_gec(
                systems[source], systems[name], refs["flt"], refs["gec"], config.shift, config.beta
            )
            gec[name] = _gec_block(ev, config.top_n, config.include_other)
            gec[name]["source"] = source
        ref_ev = evaluate_gec(refs["flt"], refs["gec"], refs["flt"], refs["gec"], False, config.beta)
        ref_edits = [e for edits in ref_ev.ref_edits.values() for e in edits]
        body["gec"] = gec
        body["reference_histogram"] = histogram_rows(
            label_histogram(ref_edits, config.top_n, not config.include_other)
        )
    return body


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_bundle(body: dict, timestamp: Optional[str] = None) -> dict:
    """Wrap a report body with a digest of its canonical JSON and a timestamp."""
    digest = hashlib.sha256(dumps(body).encode("utf-8")).hexdigest()
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()
    return {"body": body, "meta": {"body_sha256": digest, "generated_at": timestamp}}
