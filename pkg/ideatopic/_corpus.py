"""ideatopic - Topic mining for brainstorming transcripts.

This module provides ingestion of idea collections and text preprocessing.
"""

from __future__ import annotations

import functools
import json
import unicodedata
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, NamedTuple

from ideatopic.definitions import InputFormat, normalize_format
from ideatopic.utils import IdeaTopicError

if TYPE_CHECKING:
    from collections.abc import Sequence


class CorpusParseError(IdeaTopicError, ValueError):
    """Raised when a row of an input file cannot be parsed."""

    def __init__(self, path: str | Path, lineno: int, reason: str) -> None:
        super().__init__(f"{path}, line {lineno}: {reason}")
        self.lineno = lineno


class IdeaRecord(NamedTuple):
    """A single idea (sentence) contributed during a session."""

    id: int
    text: str
    speaker: str | None = None
    group: str | None = None


class TokenizedIdea(NamedTuple):
    """The retained tokens of an idea, in their original order."""

    id: int
    tokens: tuple[str, ...]


@functools.lru_cache(maxsize=None)
def builtin_stopwords() -> frozenset[str]:
    """The built-in English stopword list shipped with the package."""
    text = resources.files("ideatopic").joinpath("data/stopwords-en.txt").read_text(
        encoding="utf-8",
    )
    return frozenset(_stopword_lines(text))


def _stopword_lines(text: str) -> Iterable[str]:
    for line in text.splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            yield word


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword file with one word per line (entries are lowercased)."""
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(_stopword_lines(text))


class PreprocessConfig(NamedTuple):
    """Filters applied when turning an idea into tokens."""

    stopwords: frozenset[str]
    min_token_len: int = 2
    alphabetic_only: bool = True
    lowercase: bool = True

    @classmethod
    def create(
        cls,
        stopwords: Iterable[str] | None = None,
        *,
        min_token_len: int = 2,
        alphabetic_only: bool = True,
        lowercase: bool = True,
    ) -> PreprocessConfig:
        """Build a validated config; `stopwords=None` selects the built-in list."""
        if min_token_len < 1:
            msg = f"`min_token_len` must be >= 1, got {min_token_len}."
            raise ValueError(msg)
        words = (
            builtin_stopwords()
            if stopwords is None
            else frozenset(w.lower() for w in stopwords)
        )
        return cls(words, min_token_len, alphabetic_only, lowercase)


def ingest(
    source: str | Path,
    fmt: InputFormat | str = "plaintext",
) -> list[IdeaRecord]:
    """Read ideas from a JSONL or plaintext file.

    Ids are assigned by input order starting at 0; blank lines and blank
    texts are skipped.
    """
    path = Path(source)
    fmt = normalize_format(fmt)
    if not path.exists():
        msg = f"File `{path}` not found."
        raise FileNotFoundError(msg)
    records: list[IdeaRecord] = []
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            if fmt == "plaintext":
                text, speaker, group = line.strip(), None, None
            else:
                text, speaker, group = _parse_jsonl_row(path, lineno, line)
                text = text.strip()
                if not text:
                    continue
            records.append(IdeaRecord(len(records), text, speaker, group))
    return records


def _parse_jsonl_row(
    path: Path,
    lineno: int,
    line: str,
) -> tuple[str, str | None, str | None]:
    try:
        row = json.loads(line)
    except json.JSONDecodeError as e:
        raise CorpusParseError(path, lineno, f"invalid JSON ({e.msg})") from e
    if not isinstance(row, dict):
        raise CorpusParseError(path, lineno, "expected a JSON object")
    text = row.get("text")
    if not isinstance(text, str):
        raise CorpusParseError(path, lineno, "missing string field `text`")
    meta = []
    for key in ("speaker", "group"):
        value = row.get(key)
        if value is not None and not isinstance(value, str):
            raise CorpusParseError(path, lineno, f"field `{key}` must be a string")
        meta.append(value)
    return text, meta[0], meta[1]


def _is_punct_or_symbol(char: str) -> bool:
    return unicodedata.category(char)[0] in "PS"


def _strip_punctuation(piece: str) -> str:
    start, end = 0, len(piece)
    while start < end and _is_punct_or_symbol(piece[start]):
        start += 1
    while end > start and _is_punct_or_symbol(piece[end - 1]):
        end -= 1
    return piece[start:end]


def tokenize_and_filter(text: str, cfg: PreprocessConfig) -> list[str]:
    """Split `text` into the tokens that survive the preprocessing filters.

    Splits on Unicode whitespace, strips leading and trailing punctuation
    (and symbols such as `%`), lowercases, and drops stopwords, short tokens
    and, with `alphabetic_only`, tokens containing non-letters.
    """
    if cfg.min_token_len < 1:
        msg = f"`min_token_len` must be >= 1, got {cfg.min_token_len}."
        raise ValueError(msg)
    tokens = []
    for piece in text.split():
        token = _strip_punctuation(piece)
        if cfg.lowercase:
            token = token.lower()
        if len(token) < cfg.min_token_len:
            continue
        if token.lower() in cfg.stopwords:
            continue
        if cfg.alphabetic_only and not token.isalpha():
            continue
        tokens.append(token)
    return tokens


def tokenize_corpus(
    records: Sequence[IdeaRecord],
    cfg: PreprocessConfig,
) -> list[TokenizedIdea]:
    """Tokenize every record; ideas may end up with no tokens."""
    return [
        TokenizedIdea(r.id, tuple(tokenize_and_filter(r.text, cfg))) for r in records
    ]
