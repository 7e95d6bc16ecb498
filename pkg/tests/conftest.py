import sys
import random

import pytest


def random_tokens(rng: random.Random, max_len: int = 8, vocab: str = "abcd"):
    return [rng.choice(vocab) for _ in range(rng.randint(0, max_len))]


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def write(tmp_path):
    """Write text to tmp_path/name and return the path as a string."""

    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


def write_synth(directory, seed, n, params=None):
    """Write a synthetic corpus as dsf/labels/flt/gec files; returns {view: path}."""
    from spokengec.corpus_io import emit_labels, emit_transcripts, synth_corpus

    corpus = synth_corpus(seed, n, params)
    texts = {
        "dsf": emit_transcripts(corpus.dsf),
        "labels": emit_labels(corpus.dsf),
        "flt": emit_transcripts(corpus.flt),
        "gec": emit_transcripts(corpus.gec),
    }
    paths = {}
    for view, text in texts.items():
        path = directory / f"{view}.tsv"
        path.write_text(text, encoding="utf-8")
        paths[view] = path
    return paths


def write_config(path, entries):
    path.write_text("".join(f"{k} = {v}\n" for k, v in entries.items()), encoding="utf-8")
    return path


def perfect_asr_config(files):
    """Config in which the ASR and cascade outputs equal the references."""
    return {
        "asr.dsf": files["dsf"].name,
        "asr.flt": files["flt"].name,
        "asr.gec": files["gec"].name,
        "gec.corrections": files["gec"].name,
        "references.dsf": files["dsf"].name,
        "references.labels": files["labels"].name,
        "references.flt": files["flt"].name,
        "references.gec": files["gec"].name,
    }


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
