"""ideatopic - Topic mining for brainstorming transcripts.

This module provides C_V and C_NPMI topic coherence computed from boolean
sliding-window co-occurrence counts over a tokenized reference corpus.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import combinations
from typing import TYPE_CHECKING, Any, Iterable, NamedTuple, Sequence

import numpy as np

from ideatopic.definitions import CoherenceMetric, validate_choice
from ideatopic.utils import IdeaTopicError, warn

if TYPE_CHECKING:
    from ideatopic._topics import TopicSet

DEFAULT_WINDOW_SIZES: dict[str, int] = {"c_v": 110, "c_npmi": 10}
DEFAULT_EPSILON = 1e-12


class MissingWordError(IdeaTopicError, KeyError):
    """Raised when a word never occurs in the reference corpus."""

    def __init__(self, word: str) -> None:
        super().__init__(f"`{word}` does not occur in the reference corpus.")
        self.word = word

    def __str__(self) -> str:
        return str(self.args[0])


class UndefinedScoreError(IdeaTopicError, ValueError):
    """Raised when a topic has fewer than two words found in the corpus."""


class CoherenceConfig(NamedTuple):
    metric: CoherenceMetric = "c_v"
    top_n: int = 10
    window_size: int | None = None
    epsilon: float = DEFAULT_EPSILON

    @property
    def effective_window_size(self) -> int:
        if self.window_size is not None:
            return self.window_size
        return DEFAULT_WINDOW_SIZES[self.metric]


def validate_coherence_config(cfg: CoherenceConfig) -> None:
    validate_choice(cfg.metric, CoherenceMetric, "coherence metric")
    if cfg.top_n < 2:  # noqa: PLR2004
        msg = f"`top_n` must be >= 2, got {cfg.top_n}."
        raise ValueError(msg)
    if cfg.effective_window_size < 2:  # noqa: PLR2004
        msg = f"`window_size` must be >= 2, got {cfg.effective_window_size}."
        raise ValueError(msg)
    if cfg.epsilon <= 0:
        msg = f"`epsilon` must be > 0, got {cfg.epsilon}."
        raise ValueError(msg)


class WindowCounts(NamedTuple):
    """Window totals; `co_freq` keys are sorted word pairs."""

    total_windows: int
    doc_freq: dict[str, int]
    co_freq: dict[tuple[str, str], int]


def _windows(doc: Sequence[str], window_size: int) -> Iterable[Sequence[str]]:
    if len(doc) <= window_size:
        yield doc
        return
    for start in range(len(doc) - window_size + 1):
        yield doc[start : start + window_size]


def count_windows(
    corpus: Sequence[Sequence[str]],
    window_size: int,
    *,
    vocabulary: Iterable[str] | None = None,
) -> WindowCounts:
    """Count boolean sliding windows (stride 1) per document.

    A document shorter than the window is one window, empty documents add
    none, and windows never span documents. With `vocabulary`, only those
    words are counted; the windows themselves are unchanged.
    """
    if not corpus:
        msg = "Cannot count windows over an empty corpus."
        raise ValueError(msg)
    if window_size < 2:  # noqa: PLR2004
        msg = f"`window_size` must be >= 2, got {window_size}."
        raise ValueError(msg)
    keep = None if vocabulary is None else frozenset(vocabulary)
    total = 0
    doc_freq: Counter[str] = Counter()
    co_freq: Counter[tuple[str, str]] = Counter()
    for doc in corpus:
        if not doc:
            continue
        for window in _windows(doc, window_size):
            total += 1
            present = set(window) if keep is None else set(window) & keep
            words = sorted(present)
            doc_freq.update(words)
            co_freq.update(combinations(words, 2))
    return WindowCounts(total, dict(doc_freq), dict(co_freq))


def merge_window_counts(a: WindowCounts, b: WindowCounts) -> WindowCounts:
    """Combine counts from two disjoint shards of a corpus."""
    doc_freq = Counter(a.doc_freq)
    doc_freq.update(b.doc_freq)
    co_freq = Counter(a.co_freq)
    co_freq.update(b.co_freq)
    total = a.total_windows + b.total_windows
    return WindowCounts(total, dict(doc_freq), dict(co_freq))


def _pair_count(w1: str, w2: str, counts: WindowCounts) -> int:
    if w1 == w2:
        return counts.doc_freq.get(w1, 0)
    return counts.co_freq.get((w1, w2) if w1 < w2 else (w2, w1), 0)


def _npmi_from_probabilities(p1: float, p2: float, pj: float, epsilon: float) -> float:
    joint = pj + epsilon
    if joint >= 1.0:
        return 1.0
    return math.log(joint / (p1 * p2)) / -math.log(joint)


def npmi(
    pair: tuple[str, str],
    counts: WindowCounts,
    epsilon: float = DEFAULT_EPSILON,
) -> float:
    """Normalised PMI ``log((p12 + eps) / (p1 * p2)) / -log(p12 + eps)``.

    The pair of a word with itself uses its window count as the joint count.
    """
    w1, w2 = pair
    for word in (w1, w2):
        if counts.doc_freq.get(word, 0) == 0:
            raise MissingWordError(word)
    total = counts.total_windows
    return _npmi_from_probabilities(
        counts.doc_freq[w1] / total,
        counts.doc_freq[w2] / total,
        _pair_count(w1, w2, counts) / total,
        epsilon,
    )


def _smoothed_npmi(w1: str, w2: str, counts: WindowCounts, epsilon: float) -> float:
    # missing words get probability epsilon and never co-occur
    total = counts.total_windows
    p1 = counts.doc_freq.get(w1, 0) / total or epsilon
    p2 = counts.doc_freq.get(w2, 0) / total or epsilon
    p12 = _pair_count(w1, w2, counts) / total
    return _npmi_from_probabilities(p1, p2, p12, epsilon)


def _topic_words(
    words: Sequence[str],
    counts: WindowCounts,
    top_n: int,
) -> tuple[list[str], list[str]]:
    chosen = list(dict.fromkeys(words))[:top_n]
    missing = [w for w in chosen if counts.doc_freq.get(w, 0) == 0]
    if counts.total_windows == 0 or len(chosen) - len(missing) < 2:  # noqa: PLR2004
        msg = (
            f"Need at least 2 topic words present in the corpus, got"
            f" {len(chosen) - len(missing)} of {chosen}."
        )
        raise UndefinedScoreError(msg)
    return chosen, missing


def c_npmi_score(
    words: Sequence[str],
    counts: WindowCounts,
    cfg: CoherenceConfig = CoherenceConfig("c_npmi"),  # noqa: B008
) -> float:
    """Mean NPMI over all unordered pairs of the first `top_n` words."""
    chosen, _ = _topic_words(words, counts, cfg.top_n)
    pairs = combinations(chosen, 2)
    values = [_smoothed_npmi(a, b, counts, cfg.epsilon) for a, b in pairs]
    return math.fsum(values) / len(values)


def c_v_matrix(
    words: Sequence[str],
    counts: WindowCounts,
    epsilon: float,
) -> np.ndarray:
    """Context vectors: row `i` holds NPMI of word `i` with every topic word."""
    return np.array(
        [[_smoothed_npmi(a, b, counts, epsilon) for b in words] for a in words],
        dtype=np.float64,
    )


def c_v_score(
    words: Sequence[str],
    counts: WindowCounts,
    cfg: CoherenceConfig = CoherenceConfig("c_v"),  # noqa: B008
) -> float:
    """Mean cosine between each word's context vector and their sum.

    A zero-norm context vector makes that word contribute 0.
    """
    chosen, _ = _topic_words(words, counts, cfg.top_n)
    matrix = c_v_matrix(chosen, counts, cfg.epsilon)
    total = matrix.sum(axis=0)
    total_norm = float(np.linalg.norm(total))
    sims = []
    for row in matrix:
        norm = float(np.linalg.norm(row)) * total_norm
        sims.append(float(np.dot(row, total)) / norm if norm > 0 else 0.0)
    return min(1.0, max(-1.0, math.fsum(sims) / len(sims)))


class TopicScore(NamedTuple):
    id: int
    score: float | None
    missing: tuple[str, ...] = ()


class CoherenceReport(NamedTuple):
    metric: CoherenceMetric
    per_topic: tuple[TopicScore, ...]
    overall: float | None
    warnings: int = 0
    window_size: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric": self.metric,
            "window_size": self.window_size,
            "per_topic": [
                {"id": t.id, "score": t.score, "missing": list(t.missing)}
                for t in self.per_topic
            ],
            "overall": self.overall,
            "warnings": self.warnings,
        }


def mean_score(scores: Iterable[float | None]) -> float | None:
    """Arithmetic mean of the defined scores, `None` if there are none."""
    values = [s for s in scores if s is not None]
    return math.fsum(values) / len(values) if values else None


def score_topic_set(
    topics: TopicSet | Sequence[Sequence[str]],
    corpus: Sequence[Sequence[str]] | WindowCounts,
    cfg: CoherenceConfig = CoherenceConfig(),  # noqa: B008
) -> CoherenceReport:
    """Score every topic with the configured metric and average the scores.

    `topics` is a `TopicSet` or plain word lists (ids are then positions).
    Topics that cannot be scored get `None`, are left out of the mean and
    counted in `warnings`. Words missing from the corpus are listed per topic.
    """
    validate_coherence_config(cfg)
    if hasattr(topics, "topics"):
        topic_set: TopicSet = topics  # type: ignore[assignment]
        word_lists = [(t.cluster_id, t.words) for t in topic_set.topics]
    else:
        word_lists = list(enumerate(list(ws) for ws in topics))  # type: ignore[arg-type]
    if isinstance(corpus, WindowCounts):
        counts = corpus
    else:
        vocabulary = {w for _, ws in word_lists for w in ws[: cfg.top_n]}
        counts = count_windows(corpus, cfg.effective_window_size, vocabulary=vocabulary)
    scorer = c_v_score if cfg.metric == "c_v" else c_npmi_score

    per_topic = []
    n_warnings = 0
    for topic_id, words in word_lists:
        try:
            _, missing = _topic_words(words, counts, cfg.top_n)
            score: float | None = scorer(words, counts, cfg)
        except UndefinedScoreError as e:
            warn(f"⚠️  Topic {topic_id} has no {cfg.metric} score: {e}", stacklevel=2)
            per_topic.append(TopicScore(topic_id, None))
            n_warnings += 1
            continue
        if missing:
            warn(
                f"⚠️  Topic {topic_id} words missing from the reference corpus:"
                f" {', '.join(missing)}",
                stacklevel=2,
            )
        per_topic.append(TopicScore(topic_id, score, tuple(missing)))
    return CoherenceReport(
        cfg.metric,
        tuple(per_topic),
        mean_score(t.score for t in per_topic),
        n_warnings,
        cfg.effective_window_size,
    )
