"""Spoken grammatical error correction evaluation toolkit."""

__version__ = "0.1.0"

from spokengec.errors import DataError, UsageError
from spokengec.corpus_io import (
    Corpus,
    LabeledTranscript,
    ParallelCorpus,
    SynthParams,
    Transcript,
    pair_corpora,
    parse_label_file,
    parse_transcript_file,
    synth_corpus,
)
from spokengec.alignment import Alignment, AlignOp, WerReport, align, corpus_wer, wer
from spokengec.ter import TerScore, corpus_ter, ter
from spokengec.disfluency import (
    DdScore,
    DisfluencyRules,
    dd_score,
    deletion_predictions,
    project_labels,
    remove_disfluencies,
    tag_disfluencies,
)
from spokengec.gec_edits import (
    Edit,
    EditLabel,
    GecScore,
    classify_edit,
    extract_edits,
    f_beta,
    gec_score,
    label_histogram,
    match_edits,
    per_label_score,
    shift_spans,
)
from spokengec.lexicon import Lexicon, DEFAULT_LEXICON

__all__ = [
    "__version__",
    "DataError",
    "UsageError",
    "Corpus",
    "LabeledTranscript",
    "ParallelCorpus",
    "SynthParams",
    "Transcript",
    "pair_corpora",
    "parse_label_file",
    "parse_transcript_file",
    "synth_corpus",
    "Alignment",
    "AlignOp",
    "WerReport",
    "align",
    "corpus_wer",
    "wer",
    "TerScore",
    "corpus_ter",
    "ter",
    "DdScore",
    "DisfluencyRules",
    "dd_score",
    "deletion_predictions",
    "project_labels",
    "remove_disfluencies",
    "tag_disfluencies",
    "Edit",
    "EditLabel",
    "GecScore",
    "classify_edit",
    "extract_edits",
    "f_beta",
    "gec_score",
    "label_histogram",
    "match_edits",
    "per_label_score",
    "shift_spans",
    "Lexicon",
    "DEFAULT_LEXICON",
]
