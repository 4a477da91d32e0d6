"""ideatopic - Topic mining for brainstorming transcripts.

This module provides a from-scratch UMAP that reduces embeddings to 2-D.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, NamedTuple, Sequence

import numpy as np
from scipy import sparse

from ideatopic.definitions import InitKind, Metric, validate_choice

if TYPE_CHECKING:
    from ideatopic._embed import EmbeddingMatrix

N_COMPONENTS = 2
SMOOTH_K_TOLERANCE = 1e-5
MIN_K_DIST_SCALE = 1e-3
_BISECTION_ITERATIONS = 64
_CLIP = 4.0
_INIT_RANGE = 10.0

# Kernel constants fitted with `find_ab_params` against the piecewise target
# curve (300 samples over [0, 3 * spread]); keyed by (spread, min_dist).
_AB_TABLE: dict[tuple[float, float], tuple[float, float]] = {
    (1.0, 0.1): (1.5769434603113077, 0.8950608781227859),
}


class UmapConfig(NamedTuple):
    """Hyperparameters of the UMAP reduction; the output is always 2-D."""

    n_neighbors: int = 15
    min_dist: float = 0.1
    n_epochs: int = 200
    negative_sample_rate: int = 5
    metric: Metric = "cosine"
    seed: int = 0
    init: InitKind = "random"
    spread: float = 1.0


class KnnGraph(NamedTuple):
    """Exact k nearest neighbours; rows ascending by distance, no self-loops."""

    indices: np.ndarray
    distances: np.ndarray


class FuzzyGraph(NamedTuple):
    """Symmetric sparse membership strengths in (0, 1] with a zero diagonal."""

    weights: sparse.csr_matrix


def _as_array(X: EmbeddingMatrix | np.ndarray) -> np.ndarray:
    data = getattr(X, "data", X)
    return np.asarray(data, dtype=np.float64)


def _distance_row(data: np.ndarray, i: int, metric: Metric) -> np.ndarray:
    if metric == "euclidean":
        diff = data - data[i]
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))
    norms = np.linalg.norm(data, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    unit = data / safe[:, None]
    return np.maximum(1.0 - unit @ unit[i], 0.0)


def build_knn_graph(
    X: EmbeddingMatrix | np.ndarray,
    k: int,
    metric: Metric = "cosine",
) -> KnnGraph:
    """Brute-force k nearest neighbours; equal distances favour the smaller index."""
    validate_choice(metric, Metric, "metric")
    data = _as_array(X)
    n = data.shape[0]
    if k < 1:
        msg = f"`k` must be >= 1, got {k}."
        raise ValueError(msg)
    if n <= k:
        msg = f"Need more than k={k} points for a kNN graph, got {n}."
        raise ValueError(msg)
    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        row = _distance_row(data, i, metric)
        row[i] = np.inf
        order = np.argsort(row, kind="stable")[:k]
        indices[i] = order
        distances[i] = row[order]
    return KnnGraph(indices, distances)


def smooth_knn_calibration(
    distances: Sequence[float] | np.ndarray,
    k: int,
) -> tuple[float, float]:
    """Find the local connectivity `rho` and bandwidth `sigma` of one kNN row.

    `rho` is the smallest positive distance. `sigma` is bisected (64 steps)
    so that ``sum(exp(-max(0, d - rho) / sigma)) == log2(k)`` within 1e-5.
    Rows whose distances are all equal get ``sigma = 1.0``; otherwise sigma is
    clamped from below at ``1e-3 * mean(distances)``.
    """
    if k < 2:  # noqa: PLR2004
        msg = f"`k` must be >= 2 for calibration, got {k}."
        raise ValueError(msg)
    row = np.asarray(distances, dtype=np.float64)
    positive = row[row > 0.0]
    rho = float(positive[0]) if positive.size else 0.0
    if row.size == 0 or float(row.max()) == float(row.min()):
        return rho, 1.0

    target = math.log2(k)
    gaps = np.maximum(row - rho, 0.0)
    lo, hi, mid = 0.0, math.inf, 1.0
    for _ in range(_BISECTION_ITERATIONS):
        psum = float(np.exp(-gaps / mid).sum())
        if abs(psum - target) < SMOOTH_K_TOLERANCE:
            break
        if psum > target:
            hi = mid
            mid = (lo + hi) / 2.0
        else:
            lo = mid
            mid = mid * 2.0 if hi == math.inf else (lo + hi) / 2.0
    sigma = max(mid, MIN_K_DIST_SCALE * float(row.mean()))
    return rho, sigma


def fuzzy_graph(
    knn: KnnGraph,
    calibrations: Sequence[tuple[float, float]],
) -> FuzzyGraph:
    """Turn calibrated kNN rows into a symmetric fuzzy graph.

    Directed strengths ``exp(-max(0, d - rho_i) / sigma_i)`` are combined with
    the probabilistic t-conorm ``A + A.T - A * A.T``.
    """
    n, k = knn.indices.shape
    if len(calibrations) != n:
        msg = f"Got {len(calibrations)} calibrations for {n} rows."
        raise ValueError(msg)
    rhos = np.array([c[0] for c in calibrations], dtype=np.float64)
    sigmas = np.array([c[1] for c in calibrations], dtype=np.float64)
    gaps = np.maximum(knn.distances - rhos[:, None], 0.0)
    values = np.exp(-gaps / sigmas[:, None])
    rows = np.repeat(np.arange(n), k)
    cols = knn.indices.ravel()
    keep = rows != cols
    directed = sparse.coo_matrix(
        (values.ravel()[keep], (rows[keep], cols[keep])),
        shape=(n, n),
    ).tocsr()
    transpose = directed.transpose().tocsr()
    weights = (directed + transpose - directed.multiply(transpose)).tocsr()
    weights.setdiag(0.0)
    weights.eliminate_zeros()
    weights.sort_indices()
    return FuzzyGraph(weights)


def find_ab_params(spread: float = 1.0, min_dist: float = 0.1) -> tuple[float, float]:
    """Return `(a, b)` of the low-dimensional kernel ``1 / (1 + a * d^(2b))``.

    Tabulated settings return frozen constants; other settings are fitted with
    `scipy.optimize.curve_fit` to ``exp(-(d - min_dist) / spread)`` for
    ``d >= min_dist`` and 1 below it.
    """
    frozen = _AB_TABLE.get((float(spread), float(min_dist)))
    if frozen is not None:
        return frozen
    from scipy.optimize import curve_fit

    def curve(x: np.ndarray, a: float, b: float) -> np.ndarray:
        return 1.0 / (1.0 + a * x ** (2 * b))

    xv = np.linspace(0, spread * 3, 300)
    yv = np.where(xv < min_dist, 1.0, np.exp(-(xv - min_dist) / spread))
    params, _ = curve_fit(curve, xv, yv)
    return float(params[0]), float(params[1])


def make_epochs_per_sample(weights: np.ndarray, n_epochs: int) -> np.ndarray:
    """How many epochs pass between samples of each edge (-1 for never)."""
    result = -np.ones(weights.shape[0], dtype=np.float64)
    n_samples = n_epochs * (weights / weights.max())
    result[n_samples > 0] = float(n_epochs) / n_samples[n_samples > 0]
    return result


def _spectral_init(weights: sparse.csr_matrix, rng: np.random.Generator) -> np.ndarray:
    dense = weights.toarray()
    degree = dense.sum(axis=1)
    safe = np.where(degree > 0, degree, 1.0)
    inv_sqrt = np.where(degree > 0, 1.0 / np.sqrt(safe), 0.0)
    laplacian = np.eye(dense.shape[0]) - inv_sqrt[:, None] * dense * inv_sqrt[None, :]
    _, vectors = np.linalg.eigh(laplacian)
    coords = vectors[:, 1 : 1 + N_COMPONENTS].copy()
    for c in range(coords.shape[1]):
        # eigenvector signs are arbitrary
        if coords[np.argmax(np.abs(coords[:, c])), c] < 0:
            coords[:, c] *= -1
    scale = np.abs(coords).max()
    expansion = _INIT_RANGE / scale if scale > 0 else 1.0
    return coords * expansion + rng.normal(scale=1e-4, size=coords.shape)


class _IndexStream:
    """Buffered uniform vertex indices drawn from one seeded generator."""

    def __init__(self, rng: np.random.Generator, n: int, chunk: int = 8192) -> None:
        self._rng = rng
        self._n = n
        self._chunk = chunk
        self._buffer: list[int] = []
        self._pos = 0

    def next(self) -> int:
        if self._pos >= len(self._buffer):
            self._buffer = self._rng.integers(0, self._n, size=self._chunk).tolist()
            self._pos = 0
        value = self._buffer[self._pos]
        self._pos += 1
        return value


def _clip(value: float) -> float:
    if value > _CLIP:
        return _CLIP
    if value < -_CLIP:
        return -_CLIP
    return value


def _optimize_layout(  # noqa: PLR0913
    embedding: list[list[float]],
    head: list[int],
    tail: list[int],
    epochs_per_sample: list[float],
    cfg: UmapConfig,
    a: float,
    b: float,
    stream: _IndexStream,
) -> None:
    n_epochs = cfg.n_epochs
    rate = cfg.negative_sample_rate
    gamma = 1.0
    epoch_of_next_sample = list(epochs_per_sample)
    epochs_per_negative = [
        e / rate if rate > 0 else math.inf for e in epochs_per_sample
    ]
    epoch_of_next_negative = list(epochs_per_negative)
    n_edges = len(head)
    for epoch in range(n_epochs):
        alpha = 1.0 - epoch / n_epochs
        for i in range(n_edges):
            if epochs_per_sample[i] <= 0 or epoch_of_next_sample[i] > epoch:
                continue
            current = embedding[head[i]]
            other = embedding[tail[i]]
            dx = current[0] - other[0]
            dy = current[1] - other[1]
            dist_sq = dx * dx + dy * dy
            if dist_sq > 0.0:
                coeff = -2.0 * a * b * dist_sq ** (b - 1.0) / (a * dist_sq**b + 1.0)
            else:
                coeff = 0.0
            gx = _clip(coeff * dx) * alpha
            gy = _clip(coeff * dy) * alpha
            current[0] += gx
            current[1] += gy
            other[0] -= gx
            other[1] -= gy
            epoch_of_next_sample[i] += epochs_per_sample[i]

            if rate <= 0:
                continue
            n_neg = int((epoch - epoch_of_next_negative[i]) / epochs_per_negative[i])
            for _ in range(n_neg):
                k = stream.next()
                if k == head[i]:
                    continue
                other = embedding[k]
                dx = current[0] - other[0]
                dy = current[1] - other[1]
                dist_sq = dx * dx + dy * dy
                if dist_sq > 0.0:
                    denom = (0.001 + dist_sq) * (a * dist_sq**b + 1.0)
                    coeff = 2.0 * gamma * b / denom
                    current[0] += _clip(coeff * dx) * alpha
                    current[1] += _clip(coeff * dy) * alpha
                else:
                    current[0] += _CLIP * alpha
                    current[1] += _CLIP * alpha
            epoch_of_next_negative[i] += n_neg * epochs_per_negative[i]


def validate_umap_config(cfg: UmapConfig, n: int) -> None:
    """Raise `ValueError` if `cfg` cannot be applied to `n` points."""
    validate_choice(cfg.metric, Metric, "metric")
    validate_choice(cfg.init, InitKind, "init")
    if not 2 <= cfg.n_neighbors < n:  # noqa: PLR2004
        msg = f"`n_neighbors` must satisfy 2 <= n_neighbors < n={n}, got {cfg.n_neighbors}."
        raise ValueError(msg)
    if cfg.min_dist <= 0:
        msg = f"`min_dist` must be > 0, got {cfg.min_dist}."
        raise ValueError(msg)
    if cfg.n_epochs < 1:
        msg = f"`n_epochs` must be >= 1, got {cfg.n_epochs}."
        raise ValueError(msg)
    if cfg.negative_sample_rate < 0:
        msg = f"`negative_sample_rate` must be >= 0, got {cfg.negative_sample_rate}."
        raise ValueError(msg)


def umap_reduce(
    X: EmbeddingMatrix | np.ndarray,
    cfg: UmapConfig = UmapConfig(),  # noqa: B008
    *,
    verbose: bool = False,
) -> np.ndarray:
    """Reduce `X` to an ``n x 2`` layout.

    kNN graph, per-row calibration and fuzzy union feed an edge-sampled SGD
    with attractive moves on sampled edges and `negative_sample_rate`
    repulsive samples per move. Gradients are clipped to [-4, 4] and the
    learning rate decays linearly from 1 to 0. The optimisation loop is
    single-threaded, so a fixed seed gives identical output.
    """
    data = _as_array(X)
    n = data.shape[0]
    validate_umap_config(cfg, n)
    if verbose:
        print(f"🔍 Building {cfg.n_neighbors}-NN graph for {n} points ({cfg.metric})")
    knn = build_knn_graph(data, cfg.n_neighbors, cfg.metric)
    calibrations = [
        smooth_knn_calibration(row, cfg.n_neighbors) for row in knn.distances
    ]
    fuzzy = fuzzy_graph(knn, calibrations)
    graph = fuzzy.weights.tocoo()

    keep = graph.data >= graph.data.max() / float(cfg.n_epochs)
    head = graph.row[keep].tolist()
    tail = graph.col[keep].tolist()
    weights = graph.data[keep]
    epochs_per_sample = make_epochs_per_sample(weights, cfg.n_epochs).tolist()
    a, b = find_ab_params(cfg.spread, cfg.min_dist)

    rng = np.random.default_rng(cfg.seed)
    if cfg.init == "spectral":
        init = _spectral_init(fuzzy.weights, rng)
    else:
        init = rng.uniform(-_INIT_RANGE, _INIT_RANGE, size=(n, N_COMPONENTS))
    embedding = init.tolist()
    if verbose:
        print(f"📦 Optimising layout over {len(head)} edges for {cfg.n_epochs} epochs")
    _optimize_layout(
        embedding,
        head,
        tail,
        epochs_per_sample,
        cfg,
        a,
        b,
        _IndexStream(rng, n),
    )
    coords = np.array(embedding, dtype=np.float64)
    if not np.isfinite(coords).all():
        msg = "UMAP layout diverged to non-finite coordinates."
        raise FloatingPointError(msg)
    if verbose:
        print("✅ Layout done")
    return coords
