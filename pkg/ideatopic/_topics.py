"""ideatopic - Topic mining for brainstorming transcripts.

This module provides per-cluster vocabularies, word ranking by average
cosine similarity to the member sentences, and topic refinement by merging
the least common topic into its most similar one.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import TYPE_CHECKING, Mapping, NamedTuple, Sequence

import numpy as np

from ideatopic._embed import EmbeddingMatrix, EmbeddingProvider, cosine, embed_texts
from ideatopic.definitions import OUTLIER
from ideatopic.utils import IdeaTopicError, warn

if TYPE_CHECKING:
    from ideatopic._cluster import ClusterAssignment
    from ideatopic._corpus import IdeaRecord, TokenizedIdea

DEFAULT_K = 10


class DegenerateClusterError(IdeaTopicError, ValueError):
    """Raised when no member of a cluster has a token left after preprocessing."""

    def __init__(self, cluster_id: int) -> None:
        super().__init__(f"Cluster {cluster_id} has an empty vocabulary.")
        self.cluster_id = cluster_id


class UndefinedSimilarityError(IdeaTopicError, ValueError):
    """Raised when comparing a topic that has no words."""


class ClusterVocabulary(NamedTuple):
    """Candidate words of one cluster with the vectors needed to score them."""

    cluster_id: int
    words: tuple[str, ...]
    word_vectors: np.ndarray
    sentence_ids: tuple[int, ...]
    sentence_vectors: np.ndarray


class Topic(NamedTuple):
    cluster_id: int
    ranked_words: tuple[tuple[str, float], ...]
    k: int
    member_count: int
    member_ids: tuple[int, ...]
    vocabulary_size: int
    top_vectors: np.ndarray
    speakers: tuple[tuple[str, int], ...] = ()
    groups: tuple[tuple[str, int], ...] = ()

    @property
    def words(self) -> list[str]:
        return [word for word, _ in self.ranked_words]

    @property
    def degenerate(self) -> bool:
        return not self.ranked_words


class MergeStep(NamedTuple):
    """`source` was merged into `target` at the given topic similarity."""

    source: int
    target: int
    similarity: float


class TopicSet(NamedTuple):
    topics: tuple[Topic, ...]
    vocabularies: Mapping[int, ClusterVocabulary]
    target_count: int | None = None
    merges: tuple[MergeStep, ...] = ()
    preserved: tuple[int, ...] = ()

    def by_id(self, cluster_id: int) -> Topic:
        for topic in self.topics:
            if topic.cluster_id == cluster_id:
                return topic
        msg = f"No topic with cluster id {cluster_id}."
        raise KeyError(msg)


class WordVectorCache:
    """Embeds words as one-token texts through a provider, once per word."""

    def __init__(self, provider: EmbeddingProvider) -> None:
        self.provider = provider
        self._vectors: dict[str, np.ndarray] = {}

    def __call__(self, words: Sequence[str]) -> np.ndarray:
        missing = [w for w in dict.fromkeys(words) if w not in self._vectors]
        if missing:
            matrix = embed_texts(self.provider, missing)
            for word, row in zip(missing, matrix.data):
                self._vectors[word] = row
        return np.array([self._vectors[w] for w in words], dtype=np.float64)


def build_cluster_vocabulary(
    members: Sequence[TokenizedIdea],
    word_vectors: WordVectorCache | EmbeddingProvider,
    sentence_embeddings: EmbeddingMatrix,
    cluster_id: int = 0,
) -> ClusterVocabulary:
    """Collect the distinct retained tokens of `members` (sorted) with vectors.

    Sentence vectors are the members' rows of the original embeddings, not
    the reduced coordinates.
    """
    if not members:
        msg = f"Cluster {cluster_id} has no members."
        raise ValueError(msg)
    if isinstance(word_vectors, EmbeddingProvider):
        word_vectors = WordVectorCache(word_vectors)
    words = tuple(sorted({token for idea in members for token in idea.tokens}))
    if not words:
        raise DegenerateClusterError(cluster_id)
    sentence_ids = tuple(idea.id for idea in members)
    return ClusterVocabulary(
        cluster_id,
        words,
        word_vectors(words),
        sentence_ids,
        sentence_embeddings.rows_for(sentence_ids),
    )


def _empty_vocabulary(
    cluster_id: int,
    sentence_ids: tuple[int, ...],
    sentence_embeddings: EmbeddingMatrix,
) -> ClusterVocabulary:
    return ClusterVocabulary(
        cluster_id,
        (),
        np.empty((0, sentence_embeddings.dim)),
        sentence_ids,
        sentence_embeddings.rows_for(sentence_ids),
    )


def build_vocabularies(
    assignment: ClusterAssignment,
    tokenized: Sequence[TokenizedIdea],
    provider: EmbeddingProvider | WordVectorCache,
    sentence_embeddings: EmbeddingMatrix,
    *,
    verbose: bool = False,
) -> dict[int, ClusterVocabulary]:
    """One vocabulary per cluster label; outliers are excluded.

    Degenerate clusters get an empty vocabulary and a warning.
    """
    cache = provider
    if isinstance(provider, EmbeddingProvider):
        cache = WordVectorCache(provider)
    by_label: dict[int, list[TokenizedIdea]] = {}
    for idea, label in zip(tokenized, assignment.labels):
        if label != OUTLIER:
            by_label.setdefault(label, []).append(idea)
    vocabularies = {}
    for label in sorted(by_label):
        members = by_label[label]
        try:
            vocabularies[label] = build_cluster_vocabulary(
                members,
                cache,
                sentence_embeddings,
                label,
            )
        except DegenerateClusterError as e:
            warn(f"⚠️  {e} It is reported without topic words.", stacklevel=2)
            ids = tuple(idea.id for idea in members)
            vocabularies[label] = _empty_vocabulary(label, ids, sentence_embeddings)
        if verbose:
            print(
                f"📦 Cluster {label}: {len(members)} ideas,"
                f" {len(vocabularies[label].words)} words",
            )
    return vocabularies


def _cosine_terms(word_vec: np.ndarray, sentence_vecs: np.ndarray) -> np.ndarray:
    w = np.asarray(word_vec, dtype=np.float64)
    s = np.atleast_2d(np.asarray(sentence_vecs, dtype=np.float64))
    if s.shape[0] < 1:
        msg = "At least one sentence vector is required."
        raise ValueError(msg)
    if w.ndim != 1 or s.shape[1] != w.shape[0]:
        msg = f"Dimension mismatch: word {w.shape}, sentences {s.shape}."
        raise ValueError(msg)
    denom = np.linalg.norm(s, axis=1) * np.linalg.norm(w)
    dots = s @ w
    safe = np.where(denom > 0, denom, 1.0)
    return np.clip(np.where(denom > 0, dots / safe, 0.0), -1.0, 1.0)


def average_cosine_similarity(word_vec: np.ndarray, sentence_vecs: np.ndarray) -> float:
    """Mean cosine similarity between a word vector and each sentence vector.

    A zero-norm vector makes its term 0.
    """
    terms = _cosine_terms(word_vec, sentence_vecs)
    return math.fsum(terms.tolist()) / terms.shape[0]


def _rank(vocabulary: ClusterVocabulary, k: int) -> list[tuple[str, float, int]]:
    scored = [
        (word, average_cosine_similarity(vector, vocabulary.sentence_vectors), i)
        for i, (word, vector) in enumerate(
            zip(vocabulary.words, vocabulary.word_vectors),
        )
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def _has_zero_norm(vocabulary: ClusterVocabulary) -> bool:
    vectors = [vocabulary.word_vectors, vocabulary.sentence_vectors]
    return any(v.size and (np.linalg.norm(v, axis=1) == 0).any() for v in vectors)


def _make_topic(vocabulary: ClusterVocabulary, k: int) -> Topic:
    if _has_zero_norm(vocabulary):
        warn(
            f"⚠️  Cluster {vocabulary.cluster_id} has zero-norm vectors;"
            " their cosine terms count as 0.",
            stacklevel=3,
        )
    ranked = _rank(vocabulary, k) if vocabulary.words else []
    top_vectors = (
        vocabulary.word_vectors[[i for _, _, i in ranked]]
        if ranked
        else np.empty((0, vocabulary.sentence_vectors.shape[1]))
    )
    return Topic(
        cluster_id=vocabulary.cluster_id,
        ranked_words=tuple((word, score) for word, score, _ in ranked),
        k=k,
        member_count=len(vocabulary.sentence_ids),
        member_ids=tuple(sorted(vocabulary.sentence_ids)),
        vocabulary_size=len(vocabulary.words),
        top_vectors=top_vectors,
    )


def extract_topics(
    assignment: ClusterAssignment,
    vocabularies: Mapping[int, ClusterVocabulary],
    k: int = DEFAULT_K,
) -> TopicSet:
    """Score every vocabulary word and keep the top `k` per cluster.

    Words are ordered by descending score, ties by ascending word. A cluster
    with an empty vocabulary becomes a topic without words.
    """
    if k < 1:
        msg = f"`k` must be >= 1, got {k}."
        raise ValueError(msg)
    labels = sorted({label for label in assignment.labels if label != OUTLIER})
    missing = [label for label in labels if label not in vocabularies]
    if missing:
        msg = f"No vocabulary for clusters {missing}."
        raise ValueError(msg)
    topics = tuple(_make_topic(vocabularies[label], k) for label in labels)
    return TopicSet(topics, {label: vocabularies[label] for label in labels})


def topic_similarity(t1: Topic, t2: Topic) -> float:
    """Cosine between the centroids of the two topics' top word vectors."""
    if t1.degenerate or t2.degenerate:
        msg = "Similarity is undefined for a topic without words."
        raise UndefinedSimilarityError(msg)
    return cosine(t1.top_vectors.mean(axis=0), t2.top_vectors.mean(axis=0))


def _merge_vocabularies(
    source: ClusterVocabulary,
    target: ClusterVocabulary,
) -> ClusterVocabulary:
    vectors = dict(zip(source.words, source.word_vectors))
    vectors.update(zip(target.words, target.word_vectors))
    words = tuple(sorted(vectors))
    sentences = dict(zip(source.sentence_ids, source.sentence_vectors))
    sentences.update(zip(target.sentence_ids, target.sentence_vectors))
    sentence_ids = tuple(sorted(sentences))
    dim = target.sentence_vectors.shape[1]
    return ClusterVocabulary(
        target.cluster_id,
        words,
        np.array([vectors[w] for w in words]) if words else np.empty((0, dim)),
        sentence_ids,
        np.array([sentences[i] for i in sentence_ids]),
    )


def _best_partner(candidate: Topic, others: Sequence[Topic]) -> tuple[Topic, float]:
    def similarity(other: Topic) -> float:
        try:
            return topic_similarity(candidate, other)
        except UndefinedSimilarityError:
            return -math.inf

    scored = [(similarity(other), other) for other in others]
    best_sim, best = max(scored, key=lambda item: (item[0], -item[1].cluster_id))
    return best, best_sim


def refine_topics(
    topic_set: TopicSet,
    target_count: int,
    *,
    preserve_threshold: float | None = None,
    verbose: bool = False,
) -> TopicSet:
    """Merge topics until `target_count` remain.

    Each step takes the least common topic (fewest members, then smaller
    cluster id) and merges it into its most similar topic (ties to the smaller
    cluster id). The merged topic keeps the target's id and is re-scored over
    the union of both clusters. With `preserve_threshold`, a candidate whose
    best similarity is below it is kept as a unique topic instead.
    """
    topics = {t.cluster_id: t for t in topic_set.topics}
    if not 1 <= target_count <= len(topics):
        msg = f"`target_count` must be in [1, {len(topics)}], got {target_count}."
        raise ValueError(msg)
    vocabularies = dict(topic_set.vocabularies)
    merges = list(topic_set.merges)
    preserved = set(topic_set.preserved)
    k = topic_set.topics[0].k if topic_set.topics else DEFAULT_K

    while len(topics) > target_count:
        candidates = sorted(
            (t for t in topics.values() if t.cluster_id not in preserved),
            key=lambda t: (t.member_count, t.cluster_id),
        )
        merged = False
        for candidate in candidates:
            others = [
                t for cid, t in sorted(topics.items()) if cid != candidate.cluster_id
            ]
            partner, similarity = _best_partner(candidate, others)
            if preserve_threshold is not None and similarity < preserve_threshold:
                preserved.add(candidate.cluster_id)
                warn(
                    f"⚠️  Topic {candidate.cluster_id} is preserved as unique"
                    f" (best similarity {similarity:.3f} < {preserve_threshold}).",
                    stacklevel=2,
                )
                continue
            vocabulary = _merge_vocabularies(
                vocabularies.pop(candidate.cluster_id),
                vocabularies[partner.cluster_id],
            )
            vocabularies[partner.cluster_id] = vocabulary
            del topics[candidate.cluster_id]
            topics[partner.cluster_id] = _make_topic(vocabulary, k)
            merges.append(
                MergeStep(candidate.cluster_id, partner.cluster_id, similarity),
            )
            if verbose:
                print(
                    f"🔗 Merged topic {candidate.cluster_id} into"
                    f" {partner.cluster_id} (similarity {similarity:.3f})",
                )
            merged = True
            break
        if not merged:
            warn(
                f"⚠️  Every remaining topic is preserved; stopping at {len(topics)}"
                f" topics instead of {target_count}.",
                stacklevel=2,
            )
            break
    return TopicSet(
        tuple(topics[cid] for cid in sorted(topics)),
        vocabularies,
        target_count,
        tuple(merges),
        tuple(sorted(preserved & set(topics))),
    )


def with_composition(topic_set: TopicSet, records: Sequence[IdeaRecord]) -> TopicSet:
    """Attach the speaker and group counts of each topic's members."""
    by_id = {r.id: r for r in records}

    def counts(values: list[str | None]) -> tuple[tuple[str, int], ...]:
        return tuple(sorted(Counter(v for v in values if v is not None).items()))

    topics = tuple(
        t._replace(
            speakers=counts([by_id[i].speaker for i in t.member_ids]),
            groups=counts([by_id[i].group for i in t.member_ids]),
        )
        for t in topic_set.topics
    )
    return topic_set._replace(topics=topics)
