"""Command-line entry point: ``spokengec <subcommand> ...``.

Exit status is 0 on success, 1 on usage or configuration errors and 2 on
data or format errors. Errors print one line to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from spokengec import __version__
from spokengec._parallel import ordered_map, resolve_threads
from spokengec.alignment import align, corpus_wer, wer
from spokengec.corpus_io import (
    LabeledTranscript,
    SynthParams,
    emit_labels,
    emit_transcripts,
    pair_corpora,
    synth_corpus,
)
from spokengec.disfluency import (
    DEFAULT_RULES,
    MACRO,
    MICRO,
    DisfluencyRules,
    evaluate_deletions,
    tag_disfluencies,
)
from spokengec.errors import DataError, SpokenGecError, UsageError
from spokengec.gec_edits import (
    annotate,
    edits_to_dicts,
    emit_m2,
    evaluate_gec,
    histogram_rows,
    label_histogram,
    parse_m2,
    scores_to_dict,
)
from spokengec.pipeline import (
    PipelineConfig,
    dumps,
    load_labels,
    load_transcripts,
    read_text,
    report_bundle,
    run_pipeline,
)
from spokengec.ter import corpus_ter, ter

PROG = "spokengec"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        usage = " ".join(self.format_usage().split())
        raise UsageError(f"{message}; {usage}")


def _write(text: str, out: Optional[str] = None) -> None:
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands


def _align_one(pair):
    utt_id, ref, hyp = pair
    return utt_id, align(ref.tokens, hyp.tokens)


def cmd_align(args) -> int:
    pairs = pair_corpora(load_transcripts(args.ref), load_transcripts(args.hyp))
    results = ordered_map(_align_one, list(pairs), args.threads)
    if args.emit == "json":
        utts = []
        for utt_id, a in results:
            utts.append(
                {
                    "utt_id": utt_id,
                    "ops": [
                        {"kind": op.kind, "ref_index": op.ref_index, "hyp_index": op.hyp_index}
                        for op in a.ops
                    ],
                    "wer": wer(a).to_dict(),
                }
            )
        _write(dumps({"utterances": utts}))
    else:
        lines = []
        for utt_id, a in results:
            for op in a.ops:
                r = "-" if op.ref_index is None else str(op.ref_index)
                h = "-" if op.hyp_index is None else str(op.hyp_index)
                lines.append(f"{utt_id}\t{op.kind}\t{r}\t{h}\n")
        _write("".join(lines))
    return 0


def cmd_wer(args) -> int:
    pairs = pair_corpora(load_transcripts(args.ref), load_transcripts(args.hyp))
    report = corpus_wer(pairs, args.threads)
    if args.emit == "json":
        _write(dumps(report.to_dict()))
    else:
        flag = f" [{report.flag}]" if report.flag else ""
        _write(
            f"WER {report.wer:.2f} (S={report.subs} D={report.dels} I={report.ins} "
            f"N={report.ref_len}){flag}\n"
        )
    return 0


def cmd_ter(args) -> int:
    pairs = pair_corpora(load_transcripts(args.ref), load_transcripts(args.hyp))
    score = corpus_ter(pairs, args.threads)
    if args.emit == "json":
        _write(dumps(score.to_dict()))
    else:
        _write(
            f"TER {score.ter:.2f} (shifts={score.shifts} S={score.subs} D={score.dels} "
            f"I={score.ins} N={score.ref_len})\n"
        )
    return 0


def cmd_dd_tag(args) -> int:
    corpus = load_transcripts(args.input)
    rules = DEFAULT_RULES
    if args.rules:
        rules = DisfluencyRules.from_config(read_text(args.rules))
    tagged = [LabeledTranscript(e, tag_disfluencies(e.tokens, rules)) for e in corpus]
    _write(emit_labels(tagged), args.out)
    return 0


def cmd_dd_eval(args) -> int:
    gold = load_labels(args.gold_labels, load_transcripts(args.gold_dsf))
    ev = evaluate_deletions(
        gold, load_transcripts(args.hyp_dsf), load_transcripts(args.hyp_flt), args.averaging
    )
    if args.emit == "json":
        payload = ev.score.to_dict()
        payload["unprojected"] = ev.unprojected
        _write(dumps(payload))
    else:
        s = ev.score
        _write(
            f"P {s.precision:.2f} R {s.recall:.2f} F1 {s.f1:.2f} "
            f"({s.averaging}, {s.n_utts} utts, unprojected={ev.unprojected})\n"
        )
    return 0


def cmd_gec_extract(args) -> int:
    pairs = pair_corpora(load_transcripts(args.src), load_transcripts(args.cor))
    items = [(utt_id, s.tokens, annotate(s.tokens, c.tokens)) for utt_id, s, c in pairs]
    if args.emit == "json":
        _write(
            dumps(
                {
                    "utterances": [
                        {"utt_id": u, "source": list(src), "edits": edits_to_dicts(edits)}
                        for u, src, edits in items
                    ]
                }
            )
        )
    else:
        _write(emit_m2((src, edits) for _, src, edits in items))
    return 0


def cmd_gec_eval(args) -> int:
    if args.beta <= 0:
        raise UsageError(f"--beta must be positive, got {args.beta}")
    ev = evaluate_gec(
        load_transcripts(args.hyp_src),
        load_transcripts(args.hyp_cor),
        load_transcripts(args.ref_src),
        load_transcripts(args.ref_cor),
        shift=not args.no_shift,
        beta=args.beta,
    )
    s = ev.score
    if args.emit == "json":
        payload = {
            "precision": round(s.precision, 4),
            "recall": round(s.recall, 4),
            f"f{args.beta:g}": round(s.f_beta, 4),
            "score": s.to_dict(),
            "per_label": scores_to_dict(ev.per_label),
            "clamped_edits": ev.clamped,
            "shift": ev.shift,
        }
        _write(dumps(payload))
    else:
        _write(
            f"P {s.precision:.2f} R {s.recall:.2f} F{args.beta:g} {s.f_beta:.2f} "
            f"(TP={s.tp} FP={s.fp} FN={s.fn})\n"
        )
    return 0


def cmd_gec_report(args) -> int:
    if args.top < 0:
        raise UsageError("--top must be >= 0")
    items = parse_m2(read_text(args.edits))
    edits = [e for _, es in items for e in es]
    if any(e.label is None for e in edits):
        raise DataError(f"{args.edits}: every edit needs a label")
    hist = label_histogram(edits, args.top, exclude_other=not args.include_other)
    if args.emit == "json":
        _write(dumps({"histogram": histogram_rows(hist)}))
    else:
        _write("".join(f"{label}\t{count}\n" for label, count in hist))
    return 0


def cmd_pipeline_run(args) -> int:
    config = PipelineConfig.from_file(args.config)
    if args.threads != 1:
        config = PipelineConfig(**{**config.__dict__, "threads": args.threads})
    body = run_pipeline(config)
    _write(dumps(report_bundle(body)), args.out)
    return 0


def cmd_synth(args) -> int:
    params = SynthParams(
        filler_rate=args.filler_rate,
        repetition_rate=args.repetition_rate,
        grammar_error_rate=args.grammar_error_rate,
    )
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    corpus = synth_corpus(args.seed, args.n, params)
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {out}: {exc.strerror}") from None
    files = {
        "dsf": emit_transcripts(corpus.dsf),
        "labels": emit_labels(corpus.dsf),
        "flt": emit_transcripts(corpus.flt),
        "gec": emit_transcripts(corpus.gec),
    }
    names = {"dsf": "dsf.tsv", "labels": "dsf.labels.tsv", "flt": "flt.tsv", "gec": "gec.tsv"}
    for key, text in files.items():
        _write(text, str(out / names[key]))
    if args.emit == "json":
        injected: dict[str, int] = {}
        for labels in corpus.injected.values():
            for label in labels:
                injected[label] = injected.get(label, 0) + 1
        _write(
            dumps(
                {
                    "seed": args.seed,
                    "n_utts": args.n,
                    "files": names,
                    "injected_errors": injected,
                    "disfluent_tokens": sum(sum(e.labels) for e in corpus.dsf),
                    "dsf_tokens": sum(len(e.tokens) for e in corpus.dsf),
                }
            )
        )
    return 0


# --------------------------------------------------------------------------
# parser


def _threads(value: str) -> int:
    try:
        n = int(value)
        resolve_threads(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid thread count {value!r}") from None
    return n


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--threads", type=_threads, default=argparse.SUPPRESS, help="worker processes (0 = auto)"
    )
    common.add_argument("--version", action="version", version=f"{PROG} {__version__}")

    parser = _Parser(prog=PROG, description="Spoken GEC evaluation toolkit.")
    parser.add_argument("--threads", type=_threads, default=1, help="worker processes (0 = auto)")
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(subparsers, name, help_text, func):
        p = subparsers.add_parser(name, help=help_text, description=help_text, parents=[common])
        p.set_defaults(func=func)
        return p

    p = add(sub, "align", "per-utterance alignment op traces", cmd_align)
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--emit", choices=("tsv", "json"), default="tsv")

    p = add(sub, "wer", "pooled word error rate with Sub/Del/Ins breakdown", cmd_wer)
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--emit", choices=("text", "json"), default="text")

    p = add(sub, "ter", "pooled translation edit rate", cmd_ter)
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--emit", choices=("text", "json"), default="json")

    dd = sub.add_parser("dd", help="disfluency tagging and evaluation", parents=[common])
    dd_sub = dd.add_subparsers(dest="dd_command", metavar="command", parser_class=_Parser)
    dd_sub.required = True
    p = add(dd_sub, "tag", "rule-based disfluency tagging", cmd_dd_tag)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--rules")
    p.add_argument("--out")
    p = add(dd_sub, "eval", "deletion-based disfluency detection scores", cmd_dd_eval)
    p.add_argument("--gold-dsf", required=True)
    p.add_argument("--gold-labels", required=True)
    p.add_argument("--hyp-dsf", required=True)
    p.add_argument("--hyp-flt", required=True)
    p.add_argument("--averaging", choices=(MACRO, MICRO), default=MACRO)
    p.add_argument("--emit", choices=("text", "json"), default="json")

    gec = sub.add_parser("gec", help="grammatical edit extraction and scoring", parents=[common])
    gec_sub = gec.add_subparsers(dest="gec_command", metavar="command", parser_class=_Parser)
    gec_sub.required = True
    p = add(gec_sub, "extract", "extract and classify edits", cmd_gec_extract)
    p.add_argument("--src", required=True)
    p.add_argument("--cor", required=True)
    p.add_argument("--emit", choices=("m2", "json"), default="m2")
    p = add(gec_sub, "eval", "edit-level precision/recall/F-beta", cmd_gec_eval)
    p.add_argument("--hyp-src", required=True)
    p.add_argument("--hyp-cor", required=True)
    p.add_argument("--ref-src", required=True)
    p.add_argument("--ref-cor", required=True)
    p.add_argument("--no-shift", action="store_true")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--emit", choices=("text", "json"), default="json")
    p = add(gec_sub, "report", "edit label histogram", cmd_gec_report)
    p.add_argument("--edits", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--include-other", action="store_true")
    p.add_argument("--emit", choices=("tsv", "json"), default="tsv")

    pipe = sub.add_parser("pipeline", help="run a configured experiment", parents=[common])
    pipe_sub = pipe.add_subparsers(dest="pipeline_command", metavar="command", parser_class=_Parser)
    pipe_sub.required = True
    p = add(pipe_sub, "run", "run all evaluations named in a config file", cmd_pipeline_run)
    p.add_argument("--config", required=True)
    p.add_argument("--out")

    p = add(sub, "synth", "write a seeded synthetic dsf/flt/gec corpus", cmd_synth)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--filler-rate", type=float, default=SynthParams.filler_rate)
    p.add_argument("--repetition-rate", type=float, default=SynthParams.repetition_rate)
    p.add_argument("--grammar-error-rate", type=float, default=SynthParams.grammar_error_rate)
    p.add_argument("--emit", choices=("none", "json"), default="none")
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        # --help / --version
        return int(exc.code or 0)
    except SpokenGecError as exc:
        msg = " ".join(str(exc).split())
        print(f"{PROG}: error: {msg}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
