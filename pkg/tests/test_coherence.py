"""Tests for the C_V and C_NPMI coherence scores."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
import pytest

from ideatopic._coherence import (
    CoherenceConfig,
    MissingWordError,
    UndefinedScoreError,
    WindowCounts,
    c_npmi_score,
    c_v_score,
    count_windows,
    mean_score,
    merge_window_counts,
    npmi,
    score_topic_set,
    validate_coherence_config,
)
from ideatopic._corpus import PreprocessConfig, tokenize_corpus
from ideatopic._synthetic import generate_planted_corpus

EPS = 1e-12

FRUIT = [
    ["apple", "banana", "cherry"],
    ["apple", "banana"],
    ["apple", "cherry"],
    ["banana", "date"],
    ["elder", "fig"],
    ["grape", "honey", "kiwi", "lemon"],
]


def _oracle(words: list[str], corpus: list[list[str]], window: int) -> tuple[float, float]:
    """C_NPMI and C_V straight from enumerated windows."""
    windows = []
    for doc in corpus:
        if not doc:
            continue
        if len(doc) <= window:
            windows.append(set(doc))
        else:
            windows.extend(set(doc[s : s + window]) for s in range(len(doc) - window + 1))
    total = len(windows)

    def p(*ws: str) -> float:
        return sum(1 for w in windows if set(ws) <= w) / total

    def value(a: str, b: str) -> float:
        pa, pb = p(a) or EPS, p(b) or EPS
        joint = p(a, b) + EPS
        if joint >= 1.0:
            return 1.0
        return math.log(joint / (pa * pb)) / -math.log(joint)

    c_npmi = sum(value(a, b) for a, b in combinations(words, 2)) / math.comb(len(words), 2)
    vectors = [[value(a, b) for b in words] for a in words]
    total_vec = [sum(col) for col in zip(*vectors)]
    sims = []
    for vec in vectors:
        dot = sum(x * y for x, y in zip(vec, total_vec))
        norm = math.sqrt(sum(x * x for x in vec)) * math.sqrt(sum(y * y for y in total_vec))
        sims.append(dot / norm if norm else 0.0)
    return c_npmi, sum(sims) / len(sims)


def test_count_windows_examples() -> None:
    counts = count_windows([["a", "b", "a"]], 2)
    assert counts == WindowCounts(2, {"a": 2, "b": 2}, {("a", "b"): 2})
    assert count_windows([["a", "b", "c"]], 10).total_windows == 1
    two_docs = count_windows([["a", "b", "c"], ["c", "d"]], 2)
    assert two_docs.total_windows == 3
    assert ("b", "d") not in two_docs.co_freq
    assert ("c", "d") in two_docs.co_freq


def test_count_windows_edge_cases() -> None:
    assert count_windows([[], ["a", "b"]], 5).total_windows == 1
    counts = count_windows([["a", "b", "c"]], 2, vocabulary=["a", "c"])
    assert counts.total_windows == 2
    assert counts.doc_freq == {"a": 1, "c": 1}
    assert counts.co_freq == {}
    with pytest.raises(ValueError, match="empty corpus"):
        count_windows([], 2)
    with pytest.raises(ValueError, match="window_size"):
        count_windows([["a"]], 1)


def test_count_invariants_and_permutation() -> None:
    rng = np.random.default_rng(4)
    vocab = [f"w{i}" for i in range(8)]
    corpus = [[vocab[j] for j in rng.integers(0, 8, size=rng.integers(1, 15))] for _ in range(20)]
    counts = count_windows(corpus, 4)
    for (a, b), c in counts.co_freq.items():
        assert a < b
        assert c <= min(counts.doc_freq[a], counts.doc_freq[b])
    assert all(c <= counts.total_windows for c in counts.doc_freq.values())
    order = rng.permutation(len(corpus))
    assert count_windows([corpus[i] for i in order], 4) == counts
    merged = merge_window_counts(count_windows(corpus[:7], 4), count_windows(corpus[7:], 4))
    assert merged == counts


def test_npmi_examples() -> None:
    perfect = WindowCounts(2, {"a": 1, "b": 1}, {("a", "b"): 1})
    assert npmi(("a", "b"), perfect) == pytest.approx(1.0, abs=1e-9)
    independent = WindowCounts(4, {"a": 2, "b": 2}, {("a", "b"): 1})
    assert npmi(("a", "b"), independent) == pytest.approx(0.0, abs=1e-9)
    never = WindowCounts(100, {"a": 50, "b": 50}, {})
    expected = math.log(EPS / 0.25) / -math.log(EPS)
    assert npmi(("a", "b"), never, EPS) == pytest.approx(expected, abs=1e-12)
    assert round(expected, 3) == -0.95


def test_npmi_is_symmetric_and_checks_words() -> None:
    counts = count_windows(FRUIT, 10)
    for a, b in combinations(["apple", "banana", "cherry", "date"], 2):
        assert npmi((a, b), counts) == npmi((b, a), counts)
    assert npmi(("apple", "apple"), counts) == pytest.approx(1.0)
    with pytest.raises(MissingWordError, match="`zebra` does not occur") as excinfo:
        npmi(("apple", "zebra"), counts)
    assert excinfo.value.word == "zebra"
    assert isinstance(excinfo.value, KeyError)


def test_c_npmi_hand_oracle() -> None:
    counts = count_windows(FRUIT, 10)
    assert counts.total_windows == 6
    score = c_npmi_score(["apple", "banana", "cherry"], counts)
    expected = (math.log(4 / 3) / math.log(3) + math.log(2) / math.log(3) + 0.0) / 3
    assert score == pytest.approx(expected, abs=1e-9)
    assert score == pytest.approx(_oracle(["apple", "banana", "cherry"], FRUIT, 10)[0], abs=1e-12)


def test_c_v_hand_oracle() -> None:
    counts = count_windows(FRUIT, 10)
    x = math.log(4 / 3) / math.log(3)
    y = math.log(2) / math.log(3)
    matrix = np.array([[1.0, x, y], [x, 1.0, 0.0], [y, 0.0, 1.0]])
    total = matrix.sum(axis=0)
    cosines = matrix @ total / (np.linalg.norm(matrix, axis=1) * np.linalg.norm(total))
    score = c_v_score(["apple", "banana", "cherry"], counts)
    assert score == pytest.approx(float(cosines.mean()), abs=1e-9)
    assert -1.0 <= score <= 1.0


def test_c_v_identical_profiles_score_one() -> None:
    corpus = [["a", "b"], ["a", "b"], ["c"]]
    counts = count_windows(corpus, 10)
    assert c_v_score(["a", "b"], counts) == pytest.approx(1.0, abs=1e-9)
    assert c_npmi_score(["a", "b"], counts) == pytest.approx(1.0, abs=1e-9)


def test_c_v_orders_co_occurring_above_disjoint() -> None:
    together = count_windows([["a", "b"], ["a", "b"], ["a", "b"], ["c"]], 10)
    apart = count_windows([["a"], ["b"], ["a"], ["b"], ["c"]], 10)
    assert c_v_score(["a", "b"], together) > c_v_score(["a", "b"], apart) + 0.5
    assert c_npmi_score(["a", "b"], together) > c_npmi_score(["a", "b"], apart)


def test_scores_need_two_present_words() -> None:
    counts = count_windows(FRUIT, 10)
    with pytest.raises(UndefinedScoreError, match="at least 2"):
        c_v_score(["apple", "zebra"], counts)
    with pytest.raises(UndefinedScoreError):
        c_npmi_score(["apple", "apple"], counts)


def test_top_n_limits_the_words() -> None:
    counts = count_windows(FRUIT, 10)
    cfg = CoherenceConfig("c_npmi", top_n=2)
    assert c_npmi_score(["apple", "cherry", "banana"], counts, cfg) == pytest.approx(
        math.log(2) / math.log(3),
        abs=1e-9,
    )


def test_mean_score() -> None:
    assert mean_score([0.5, 0.7]) == pytest.approx(0.6)
    assert mean_score([0.4, None]) == 0.4
    assert mean_score([None]) is None


def test_score_topic_set_report() -> None:
    cfg = CoherenceConfig("c_npmi", window_size=10)
    report = score_topic_set([["apple", "banana", "cherry"]], FRUIT, cfg)
    assert report.metric == "c_npmi"
    assert report.window_size == 10
    assert report.overall == report.per_topic[0].score
    assert report.warnings == 0
    assert report.to_dict()["per_topic"][0]["id"] == 0


def test_score_topic_set_flags_missing_and_unscorable() -> None:
    cfg = CoherenceConfig("c_npmi", window_size=10)
    topics = [["apple", "banana", "zebra"], ["yak", "zebra"], ["grape", "honey"]]
    with pytest.warns(UserWarning, match="missing from the reference corpus: zebra"):
        report = score_topic_set(topics, FRUIT, cfg)
    first, second, third = report.per_topic
    assert first.missing == ("zebra",)
    assert first.score is not None
    assert second.score is None
    assert report.warnings == 1
    assert report.overall == pytest.approx((first.score + third.score) / 2)


def test_score_topic_set_accepts_counts() -> None:
    counts = count_windows(FRUIT, 110)
    from_counts = score_topic_set([["apple", "banana"]], counts)
    from_corpus = score_topic_set([["apple", "banana"]], FRUIT)
    assert from_counts.overall == pytest.approx(from_corpus.overall)
    assert from_corpus.window_size == 110


def test_planted_topics_match_oracle() -> None:
    planted = generate_planted_corpus(120, 6, seed=3)
    corpus = [list(t.tokens) for t in tokenize_corpus(planted.records, PreprocessConfig.create())]
    topics = [list(vocabulary[:10]) for vocabulary in planted.vocabularies]
    for metric, index in (("c_npmi", 0), ("c_v", 1)):
        cfg = CoherenceConfig(metric, window_size=10)  # type: ignore[arg-type]
        report = score_topic_set(topics, corpus, cfg)
        expected = [_oracle(words, corpus, 10)[index] for words in topics]
        assert report.overall == pytest.approx(sum(expected) / len(expected), abs=1e-9)
        assert all(-1.0 <= t.score <= 1.0 for t in report.per_topic)  # type: ignore[operator]


@pytest.mark.parametrize(
    ("cfg", "match"),
    [
        (CoherenceConfig("u_mass"), "Invalid coherence metric"),  # type: ignore[arg-type]
        (CoherenceConfig(top_n=1), "top_n"),
        (CoherenceConfig(window_size=1), "window_size"),
        (CoherenceConfig(epsilon=0.0), "epsilon"),
    ],
)
def test_validate_coherence_config(cfg: CoherenceConfig, match: str) -> None:
    with pytest.raises(ValueError, match=match):
        validate_coherence_config(cfg)


def test_c_npmi_never_drops_when_topic_words_co_occur_more() -> None:
    vocabulary = [f"w{i}" for i in range(15)]
    for seed in range(200):
        rng = np.random.default_rng(seed)
        corpus = [
            list(rng.choice(vocabulary, size=int(rng.integers(1, 15))))
            for _ in range(int(rng.integers(5, 40)))
        ]
        present = sorted({w for doc in corpus for w in doc})
        if len(present) < 2:
            continue
        size = int(rng.integers(2, min(6, len(present)) + 1))
        topic = [str(w) for w in rng.choice(present, size=size, replace=False)]
        previous = c_npmi_score(topic, count_windows(corpus, 10))
        for _ in range(3):
            corpus.append(list(topic))
            score = c_npmi_score(topic, count_windows(corpus, 10))
            assert score >= previous - 1e-9
            previous = score
