"""ideatopic - Topic mining for brainstorming transcripts.

This module provides the embedding provider boundary: a deterministic hash
provider, a precomputed-file provider and a remote HTTP provider.
"""

from __future__ import annotations

import functools
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import TYPE_CHECKING, Any, NamedTuple

import httpx
import numpy as np
from tenacity import (
    RetryError,
    Retrying,
    retry_if_exception_type,
    stop_after_attempt,
    wait_exponential,
)

from ideatopic._corpus import _strip_punctuation
from ideatopic.definitions import ProviderKind, validate_choice
from ideatopic.utils import IdeaTopicError

if TYPE_CHECKING:
    from collections.abc import Hashable, Sequence

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK_64 = (1 << 64) - 1


class EmbeddingFormatError(IdeaTopicError, ValueError):
    """Raised when an embedding file violates the documented format."""


class EmbeddingLookupError(IdeaTopicError, KeyError):
    """Raised when a precomputed embedding file lacks a requested text."""


class EmbeddingProtocolError(IdeaTopicError, ValueError):
    """Raised when an embedding service answers with misaligned rows."""


class EmbeddingTransportError(IdeaTopicError, ConnectionError):
    """Raised when an embedding service cannot be reached after retrying."""

    def __init__(self, message: str, attempts: int) -> None:
        super().__init__(message)
        self.attempts = attempts


class _BadResponseError(Exception):
    """A response that should be retried (wrong status, body, or dimension)."""


class EmbeddingMatrix(NamedTuple):
    """Dense vectors, one row per id (idea id or word)."""

    ids: tuple[Hashable, ...]
    data: np.ndarray

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def rows_for(self, ids: Sequence[Hashable]) -> np.ndarray:
        """Return the rows belonging to `ids`, in the given order."""
        index = {key: i for i, key in enumerate(self.ids)}
        return self.data[[index[key] for key in ids]]


def make_embedding_matrix(
    ids: Sequence[Hashable],
    data: np.ndarray | Sequence[Sequence[float]],
) -> EmbeddingMatrix:
    """Validate and build an `EmbeddingMatrix`."""
    array = np.asarray(data, dtype=np.float64)
    if array.ndim != 2:  # noqa: PLR2004
        msg = f"Embedding data must be 2-dimensional, got shape {array.shape}."
        raise ValueError(msg)
    if array.shape[0] != len(ids):
        msg = f"Got {array.shape[0]} rows for {len(ids)} ids."
        raise ValueError(msg)
    if array.shape[1] < 2:  # noqa: PLR2004
        msg = f"Embedding dimension must be >= 2, got {array.shape[1]}."
        raise ValueError(msg)
    if not np.isfinite(array).all():
        msg = "Embedding data contains non-finite values."
        raise ValueError(msg)
    return EmbeddingMatrix(tuple(ids), array)


class EmbeddingProvider(NamedTuple):
    """Where embeddings come from; read-only after construction.

    `dim` sizes the `hash` vectors only; `file` and `http` take the
    dimension from the data. `transport` replaces the network layer of the
    `http` client, e.g. with `httpx.MockTransport`.
    """

    kind: ProviderKind = "hash"
    dim: int = 64
    seed: int = 0
    path: Path | None = None
    endpoint: str | None = None
    batch_size: int = 32
    timeout: float = 30.0
    max_workers: int = 1
    retries: int = 3
    backoff: float = 0.5
    transport: httpx.BaseTransport | None = None


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash (offset basis 0xcbf29ce484222325, prime 0x100000001b3)."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK_64
    return h


@functools.lru_cache(maxsize=65536)
def _token_vector(token: str, dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([fnv1a_64(token.encode("utf-8")), seed & _MASK_64])
    vector = rng.standard_normal(dim)
    vector /= np.linalg.norm(vector)
    vector.setflags(write=False)
    return vector


def _hash_tokens(text: str) -> list[str]:
    tokens = []
    for piece in text.split():
        token = _strip_punctuation(piece).lower()
        if token:
            tokens.append(token)
    return tokens


def deterministic_hash_embed(text: str, dim: int, seed: int) -> np.ndarray:
    """Embed `text` as the normalised mean of per-token pseudo-random unit vectors.

    Tokens are whitespace pieces with edge punctuation stripped and lowercased.
    Each token seeds a generator with ``(fnv1a_64(token), seed)``, so shared
    tokens raise the cosine similarity of two texts. An empty token list
    yields the first basis vector.
    """
    if dim < 2:  # noqa: PLR2004
        msg = f"Embedding dimension must be >= 2, got {dim}."
        raise ValueError(msg)
    tokens = _hash_tokens(text)
    basis = np.zeros(dim)
    basis[0] = 1.0
    if not tokens:
        return basis
    mean = np.mean([_token_vector(t, dim, seed) for t in tokens], axis=0)
    norm = np.linalg.norm(mean)
    if norm == 0.0:
        return basis
    return mean / norm


def load_embedding_file(path: str | Path) -> dict[str, np.ndarray]:
    """Read `{"dim": d, "vectors": {text: [float, ...]}}` into a text to vector map."""
    with Path(path).open(encoding="utf-8") as f:
        try:
            payload = json.load(f)
        except json.JSONDecodeError as e:
            msg = f"`{path}` is not valid JSON: {e.msg}"
            raise EmbeddingFormatError(msg) from e
    vectors = payload.get("vectors") if isinstance(payload, dict) else None
    if not isinstance(vectors, dict):
        msg = f"`{path}` must contain a `vectors` object."
        raise EmbeddingFormatError(msg)
    declared = payload.get("dim")
    result: dict[str, np.ndarray] = {}
    dim = None
    for text, values in vectors.items():
        vector = np.asarray(values, dtype=np.float64)
        if vector.ndim != 1:
            msg = f"Vector for `{text}` in `{path}` is not a flat list."
            raise EmbeddingFormatError(msg)
        if dim is None:
            dim = vector.shape[0]
        if vector.shape[0] != dim:
            msg = (
                f"Mixed dimensions in `{path}`: `{text}` has {vector.shape[0]},"
                f" expected {dim}."
            )
            raise EmbeddingFormatError(msg)
        if not np.isfinite(vector).all():
            msg = f"Vector for `{text}` in `{path}` contains non-finite values."
            raise EmbeddingFormatError(msg)
        result[text] = vector
    if declared is not None and dim is not None and declared != dim:
        msg = f"`{path}` declares dim {declared} but vectors have dim {dim}."
        raise EmbeddingFormatError(msg)
    return result


def write_embedding_file(
    path: str | Path,
    texts: Sequence[str],
    matrix: EmbeddingMatrix,
) -> None:
    """Write vectors in the format read by `load_embedding_file`."""
    vectors: dict[str, list[float]] = {}
    for text, row in zip(texts, matrix.data):
        vectors.setdefault(text, [float(x) for x in row])
    payload = {"dim": matrix.dim, "vectors": vectors}
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def _post_batch(
    client: httpx.Client,
    endpoint: str,
    batch: list[str],
    dim: int | None,
) -> list[list[float]]:
    response = client.post(endpoint, json={"texts": batch})
    if response.status_code != 200:  # noqa: PLR2004
        msg = f"HTTP {response.status_code} from `{endpoint}`"
        raise _BadResponseError(msg)
    try:
        embeddings = response.json()["embeddings"]
    except (ValueError, KeyError, TypeError) as e:
        msg = f"Malformed response body from `{endpoint}`: {e}"
        raise _BadResponseError(msg) from e
    if len(embeddings) != len(batch):
        msg = f"Requested {len(batch)} embeddings, `{endpoint}` returned {len(embeddings)}."
        raise EmbeddingProtocolError(msg)
    expected = dim if dim is not None else len(embeddings[0]) if embeddings else 0
    if any(len(row) != expected for row in embeddings):
        msg = f"Dimension mismatch in response from `{endpoint}` (expected {expected})."
        raise _BadResponseError(msg)
    return embeddings


def fetch_remote_embeddings(
    endpoint: str,
    texts: Sequence[str],
    batch_size: int = 32,
    *,
    dim: int | None = None,
    timeout: float = 30.0,
    retries: int = 3,
    backoff: float = 0.5,
    max_workers: int = 1,
    transport: httpx.BaseTransport | None = None,
) -> EmbeddingMatrix:
    """POST `{"texts": [...]}` batches to `endpoint` and assemble the rows in order.

    Each batch is retried up to `retries` times with exponential backoff
    (`backoff`, `2 * backoff`, ... seconds). Batches may be fetched on a
    thread pool; rows are always assembled by input index.
    """
    if not texts:
        msg = "Cannot embed an empty list of texts."
        raise ValueError(msg)
    if batch_size < 1:
        msg = f"`batch_size` must be >= 1, got {batch_size}."
        raise ValueError(msg)
    batches = [
        list(texts[i : i + batch_size]) for i in range(0, len(texts), batch_size)
    ]
    attempts = retries + 1
    retrying = Retrying(
        stop=stop_after_attempt(attempts),
        wait=wait_exponential(multiplier=backoff),
        retry=retry_if_exception_type((httpx.HTTPError, _BadResponseError)),
    )

    def _fetch(batch: list[str]) -> list[list[float]]:
        try:
            return retrying(_post_batch, client, endpoint, batch, dim)
        except RetryError as e:
            last = e.last_attempt.exception()
            msg = (
                f"❌ Embedding request to `{endpoint}` failed after"
                f" {attempts} attempts: {last}"
            )
            raise EmbeddingTransportError(msg, attempts) from last

    with httpx.Client(timeout=timeout, transport=transport) as client:
        if max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                results = list(pool.map(_fetch, batches))
        else:
            results = [_fetch(batch) for batch in batches]
    rows = [row for batch_rows in results for row in batch_rows]
    if len({len(row) for row in rows}) != 1:
        msg = f"Batches from `{endpoint}` disagree on the embedding dimension."
        raise EmbeddingProtocolError(msg)
    return make_embedding_matrix(list(texts), rows)


def embed_texts(
    provider: EmbeddingProvider,
    texts: Sequence[str],
    ids: Sequence[Hashable] | None = None,
) -> EmbeddingMatrix:
    """Embed `texts` with `provider`, one row per text in input order.

    `ids` label the rows (defaults to the texts themselves). Words are
    embedded as one-token texts, so words and sentences share one space.
    """
    validate_choice(provider.kind, ProviderKind, "provider")
    if not texts:
        msg = "Cannot embed an empty list of texts."
        raise ValueError(msg)
    ids = list(texts) if ids is None else list(ids)
    if provider.kind == "hash":
        data: Any = [
            deterministic_hash_embed(t, provider.dim, provider.seed) for t in texts
        ]
    elif provider.kind == "file":
        if provider.path is None:
            msg = "The `file` provider requires an embedding file path."
            raise ValueError(msg)
        vectors = load_embedding_file(provider.path)
        missing = next((t for t in texts if t not in vectors), None)
        if missing is not None:
            msg = f"No embedding for text `{missing}` in `{provider.path}`."
            raise EmbeddingLookupError(msg)
        data = [vectors[t] for t in texts]
    else:
        if provider.endpoint is None:
            msg = "The `http` provider requires an endpoint URL."
            raise ValueError(msg)
        data = fetch_remote_embeddings(
            provider.endpoint,
            texts,
            provider.batch_size,
            timeout=provider.timeout,
            retries=provider.retries,
            backoff=provider.backoff,
            max_workers=provider.max_workers,
            transport=provider.transport,
        ).data
    return make_embedding_matrix(ids, data)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm."""
    norm = float(np.linalg.norm(a)) * float(np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return max(-1.0, min(1.0, float(np.dot(a, b)) / norm))
