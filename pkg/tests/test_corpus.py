"""Tests for ingestion and preprocessing."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from ideatopic._corpus import (
    CorpusParseError,
    IdeaRecord,
    PreprocessConfig,
    builtin_stopwords,
    ingest,
    load_stopwords,
    tokenize_and_filter,
    tokenize_corpus,
)

from .helpers import write_lines


def test_ingest_plaintext_skips_blank_lines(tmp_path: Path) -> None:
    p = write_lines(tmp_path / "ideas.txt", ["Free parking downtown", "", "   ", "More bike lanes"])
    records = ingest(p, "text")
    assert records == [
        IdeaRecord(0, "Free parking downtown"),
        IdeaRecord(1, "More bike lanes"),
    ]


def test_ingest_jsonl_with_metadata(tmp_path: Path) -> None:
    rows = [
        {"text": "Free parking downtown", "speaker": "Ana", "group": "red"},
        {"text": "More bike lanes"},
        {"text": "   "},
    ]
    p = write_lines(tmp_path / "ideas.jsonl", [json.dumps(r) for r in rows])
    records = ingest(p, "jsonl")
    assert records == [
        IdeaRecord(0, "Free parking downtown", "Ana", "red"),
        IdeaRecord(1, "More bike lanes", None, None),
    ]


@pytest.mark.parametrize(
    ("line", "reason"),
    [
        ('{"text": "ok"', "invalid JSON"),
        ("[1, 2]", "expected a JSON object"),
        ('{"speaker": "Ana"}', "missing string field `text`"),
        ('{"text": 3}', "missing string field `text`"),
        ('{"text": "ok", "group": 1}', "field `group` must be a string"),
    ],
)
def test_ingest_jsonl_errors_name_the_line(tmp_path: Path, line: str, reason: str) -> None:
    p = write_lines(tmp_path / "ideas.jsonl", ['{"text": "fine"}', line])
    with pytest.raises(CorpusParseError, match=f"line 2: {reason}") as excinfo:
        ingest(p, "jsonl")
    assert excinfo.value.lineno == 2
    assert isinstance(excinfo.value, ValueError)


def test_ingest_missing_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError, match="not found"):
        ingest(tmp_path / "nope.txt")


def test_ingest_rejects_unknown_format(tmp_path: Path) -> None:
    p = write_lines(tmp_path / "ideas.txt", ["x"])
    with pytest.raises(ValueError, match="Invalid input format"):
        ingest(p, "csv")


def test_tokenize_strips_punctuation_and_stopwords() -> None:
    cfg = PreprocessConfig.create()
    assert tokenize_and_filter("We should add more parking!", cfg) == ["add", "parking"]
    assert tokenize_and_filter("Price up 20%", cfg) == ["price"]
    assert tokenize_and_filter("", cfg) == []


def test_tokenize_options() -> None:
    cfg = PreprocessConfig.create(
        ["the"],
        min_token_len=1,
        alphabetic_only=False,
        lowercase=False,
    )
    assert tokenize_and_filter("The A4 paper, a lot!", cfg) == ["A4", "paper", "a", "lot"]
    cfg = PreprocessConfig.create([], min_token_len=4)
    assert tokenize_and_filter("car park garage", cfg) == ["park", "garage"]


def test_tokenize_unicode_whitespace_and_quotes() -> None:
    cfg = PreprocessConfig.create([])
    assert tokenize_and_filter("«café» “naïve”", cfg) == ["café", "naïve"]


def test_min_token_len_must_be_positive() -> None:
    with pytest.raises(ValueError, match="min_token_len"):
        PreprocessConfig.create(min_token_len=0)
    with pytest.raises(ValueError, match="min_token_len"):
        tokenize_and_filter("x", PreprocessConfig(frozenset(), min_token_len=0))


def test_stopwords(tmp_path: Path) -> None:
    builtin = builtin_stopwords()
    assert {"the", "and", "we"} <= builtin
    assert "parking" not in builtin
    p = write_lines(tmp_path / "stop.txt", ["# comment", "Parking", "", "lot"])
    assert load_stopwords(p) == frozenset({"parking", "lot"})


def test_tokenize_corpus_keeps_ids_and_empty_ideas() -> None:
    records = [IdeaRecord(0, "Parking garage"), IdeaRecord(1, "the and")]
    tokenized = tokenize_corpus(records, PreprocessConfig.create())
    assert [t.id for t in tokenized] == [0, 1]
    assert tokenized[0].tokens == ("parking", "garage")
    assert tokenized[1].tokens == ()


ALPHABET = list("abcdeXYZéü.,!?-'%09") + [" ", " ", "\t", "—"]


@pytest.mark.parametrize("alphabetic_only", [True, False])
@pytest.mark.parametrize("lowercase", [True, False])
def test_tokenize_is_idempotent_on_random_text(alphabetic_only: bool, lowercase: bool) -> None:
    cfg = PreprocessConfig.create(
        ["the", "abc"],
        min_token_len=2,
        alphabetic_only=alphabetic_only,
        lowercase=lowercase,
    )
    rng = np.random.default_rng(int(alphabetic_only) * 2 + int(lowercase))
    for _ in range(500):
        text = "".join(rng.choice(ALPHABET, size=int(rng.integers(0, 40))))
        once = tokenize_and_filter(text, cfg)
        assert tokenize_and_filter(" ".join(once), cfg) == once


def test_ingest_twice_gives_equal_records(tmp_path: Path) -> None:
    rows = [{"text": f"Idea {i} about parking", "speaker": f"s{i % 3}"} for i in range(25)]
    jsonl = write_lines(tmp_path / "ideas.jsonl", [json.dumps(r) for r in rows])
    text = write_lines(tmp_path / "ideas.txt", [r["text"] for r in rows])
    assert ingest(jsonl, "jsonl") == ingest(jsonl, "jsonl")
    assert ingest(text, "text") == ingest(text, "text")
    assert [r.text for r in ingest(jsonl, "jsonl")] == [r.text for r in ingest(text, "text")]
