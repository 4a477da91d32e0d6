"""ideatopic - Topic mining for brainstorming transcripts.

This module provides a from-scratch HDBSCAN over the reduced coordinates:
mutual reachability, a minimum spanning tree, the condensed cluster tree and
excess-of-mass cluster selection.
"""

from __future__ import annotations

import math
from collections import deque
from itertools import groupby
from typing import NamedTuple, Sequence

import numpy as np

from ideatopic.definitions import OUTLIER


class HdbscanConfig(NamedTuple):
    """Density clustering parameters; selection is always excess of mass."""

    min_cluster_size: int = 5
    min_samples: int | None = None
    allow_single_cluster: bool = True
    single_cluster_min_probability: float = 0.05

    @property
    def effective_min_samples(self) -> int:
        return self.min_cluster_size if self.min_samples is None else self.min_samples


class MstEdge(NamedTuple):
    u: int
    v: int
    weight: float


class CondensedRow(NamedTuple):
    """One edge of the condensed tree; `child < n` means a single point."""

    parent: int
    child: int
    lambda_val: float
    child_size: int


class CondensedTree(NamedTuple):
    """Condensed hierarchy; the root cluster id is `n`, parents precede children."""

    rows: tuple[CondensedRow, ...]
    n_points: int
    selected: tuple[int, ...] = ()
    stability: dict[int, float] = {}  # noqa: RUF012


class ClusterAssignment(NamedTuple):
    labels: tuple[int, ...]
    n_clusters: int
    probabilities: tuple[float, ...]

    @property
    def n_outliers(self) -> int:
        return sum(1 for label in self.labels if label == OUTLIER)

    def members(self, label: int) -> list[int]:
        """Indices of the points carrying `label`."""
        return [i for i, lab in enumerate(self.labels) if lab == label]


def validate_hdbscan_config(cfg: HdbscanConfig) -> None:
    if cfg.min_cluster_size < 2:  # noqa: PLR2004
        msg = f"`min_cluster_size` must be >= 2, got {cfg.min_cluster_size}."
        raise ValueError(msg)
    if cfg.effective_min_samples < 1:
        msg = f"`min_samples` must be >= 1, got {cfg.min_samples}."
        raise ValueError(msg)
    if not 0.0 <= cfg.single_cluster_min_probability <= 1.0:
        msg = (
            "`single_cluster_min_probability` must be in [0, 1],"
            f" got {cfg.single_cluster_min_probability}."
        )
        raise ValueError(msg)


def _lambda(distance: float) -> float:
    return math.inf if distance == 0.0 else 1.0 / distance


def _lambda_gap(lam: float, birth: float) -> float:
    if lam == birth:
        return 0.0
    return lam - birth


def mutual_reachability(points: np.ndarray, min_samples: int) -> np.ndarray:
    """Mutual reachability distances ``max(core(a), core(b), d(a, b))``.

    The core distance of a point is the Euclidean distance to its
    `min_samples`-th nearest neighbour, not counting the point itself.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if min_samples < 1:
        msg = f"`min_samples` must be >= 1, got {min_samples}."
        raise ValueError(msg)
    if n <= min_samples:
        msg = f"Need more than min_samples={min_samples} points, got {n}."
        raise ValueError(msg)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    others = dist.copy()
    np.fill_diagonal(others, np.inf)
    core = np.sort(others, axis=1)[:, min_samples - 1]
    mreach = np.maximum(np.maximum(core[:, None], core[None, :]), dist)
    np.fill_diagonal(mreach, 0.0)
    return mreach


def build_mst(dist: np.ndarray) -> list[MstEdge]:
    """Prim's algorithm on a dense symmetric matrix, O(n^2).

    Ties are broken by ``(weight, min endpoint, max endpoint)`` and the edges
    are returned sorted by the same key.
    """
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    if n < 2:  # noqa: PLR2004
        return []
    idx = np.arange(n)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = dist[0].copy()
    parent = np.zeros(n, dtype=np.int64)
    edges: list[MstEdge] = []
    for _ in range(n - 1):
        candidates = np.flatnonzero(~in_tree)
        lo = np.minimum(parent[candidates], candidates)
        hi = np.maximum(parent[candidates], candidates)
        pick = candidates[np.lexsort((hi, lo, best[candidates]))[0]]
        u, v = sorted((int(parent[pick]), int(pick)))
        edges.append(MstEdge(u, v, float(best[pick])))
        in_tree[pick] = True

        row = dist[pick]
        new_lo, new_hi = np.minimum(pick, idx), np.maximum(pick, idx)
        old_lo, old_hi = np.minimum(parent, idx), np.maximum(parent, idx)
        smaller_key = (new_lo < old_lo) | ((new_lo == old_lo) & (new_hi < old_hi))
        better = ~in_tree & ((row < best) | ((row == best) & smaller_key))
        best[better] = row[better]
        parent[better] = pick
    edges.sort(key=lambda e: (e.weight, e.u, e.v))
    return edges


class _Dendrogram:
    """Single-linkage hierarchy where equal-weight merges happen at once."""

    def __init__(self, edges: Sequence[tuple[int, int, float]], n: int) -> None:
        self.children: list[list[int]] = [[] for _ in range(n)]
        self.distance: list[float] = [0.0] * n
        self.size: list[int] = [1] * n
        self.min_point: list[int] = list(range(n))
        uf = list(range(n))
        node_of = list(range(n))

        def find(x: int) -> int:
            while uf[x] != x:
                uf[x] = uf[uf[x]]
                x = uf[x]
            return x

        ordered = sorted(edges, key=lambda e: (e[2], min(e[0], e[1]), max(e[0], e[1])))
        for weight, group in groupby(ordered, key=lambda e: e[2]):
            pairs = [(find(u), find(v)) for u, v, _ in group]
            local: dict[int, int] = {}

            def local_find(x: int) -> int:
                local.setdefault(x, x)
                while local[x] != x:
                    x = local[x]
                return x

            for a, b in pairs:
                ra, rb = local_find(a), local_find(b)
                if ra != rb:
                    local[max(ra, rb)] = min(ra, rb)
            merged: dict[int, list[int]] = {}
            for root in local:
                merged.setdefault(local_find(root), []).append(root)
            for roots in merged.values():
                if len(roots) < 2:  # noqa: PLR2004
                    continue
                kids = sorted(
                    (node_of[r] for r in roots),
                    key=self.min_point.__getitem__,
                )
                node = self._add(kids, weight)
                for r in roots[1:]:
                    uf[r] = roots[0]
                node_of[roots[0]] = node
        self.root = len(self.children) - 1

    def _add(self, kids: list[int], distance: float) -> int:
        self.children.append(kids)
        self.distance.append(distance)
        self.size.append(sum(self.size[k] for k in kids))
        self.min_point.append(min(self.min_point[k] for k in kids))
        return len(self.children) - 1

    def leaves(self, node: int) -> list[int]:
        out, stack = [], [node]
        while stack:
            current = stack.pop()
            if self.children[current]:
                stack.extend(self.children[current])
            else:
                out.append(current)
        return sorted(out)


def _condense(tree: _Dendrogram, n: int, min_cluster_size: int) -> list[CondensedRow]:
    rows: list[CondensedRow] = []
    next_id = n + 1
    queue = deque([(n, tree.root)])
    while queue:
        cluster, node = queue.popleft()
        while True:
            lam = _lambda(tree.distance[node])
            kids = tree.children[node]
            big = [k for k in kids if tree.size[k] >= min_cluster_size]
            if len(big) >= 2:  # noqa: PLR2004
                for kid in kids:
                    if tree.size[kid] >= min_cluster_size:
                        rows.append(CondensedRow(cluster, next_id, lam, tree.size[kid]))
                        queue.append((next_id, kid))
                        next_id += 1
                    else:
                        rows.extend(
                            CondensedRow(cluster, p, lam, 1) for p in tree.leaves(kid)
                        )
                break
            for kid in kids:
                if tree.size[kid] < min_cluster_size:
                    rows.extend(
                        CondensedRow(cluster, p, lam, 1) for p in tree.leaves(kid)
                    )
            if not big:
                break
            node = big[0]
    return rows


def _stabilities(rows: Sequence[CondensedRow], n: int) -> dict[int, float]:
    birth = {n: 0.0}
    for row in rows:
        if row.child >= n:
            birth[row.child] = row.lambda_val
    terms: dict[int, list[float]] = {c: [] for c in birth}
    for row in rows:
        gap = _lambda_gap(row.lambda_val, birth[row.parent])
        terms[row.parent].append(gap * row.child_size)
    return {c: math.fsum(t) for c, t in terms.items()}


def _select_eom(
    rows: Sequence[CondensedRow],
    stability: dict[int, float],
    n: int,
    allow_root: bool,  # noqa: FBT001
) -> set[int]:
    children: dict[int, list[int]] = {c: [] for c in stability}
    for row in rows:
        if row.child >= n:
            children[row.parent].append(row.child)
    selected: set[int] = set()
    subtree: dict[int, float] = {}
    for cluster in sorted(stability, reverse=True):
        if cluster == n and not allow_root:
            break
        kids = children[cluster]
        if not kids:
            selected.add(cluster)
            subtree[cluster] = stability[cluster]
            continue
        below = math.fsum(subtree[k] for k in kids)
        if stability[cluster] > below:
            stack = list(kids)
            while stack:
                c = stack.pop()
                selected.discard(c)
                stack.extend(children[c])
            selected.add(cluster)
            subtree[cluster] = stability[cluster]
        else:
            subtree[cluster] = below
    return selected


def condense_and_extract(  # noqa: PLR0912
    edges: Sequence[tuple[int, int, float]],
    n: int,
    min_cluster_size: int,
    *,
    allow_single_cluster: bool = True,
    single_cluster_min_probability: float = 0.05,
) -> tuple[CondensedTree, ClusterAssignment]:
    """Condense the single-linkage hierarchy of `edges` and pick clusters.

    Splits leaving a side smaller than `min_cluster_size` make those points
    fall out of the parent at that lambda. Stability is
    ``sum((lambda_p - lambda_birth) * size)`` and a parent beats its children
    only when its stability is strictly larger. Labels are numbered by the
    smallest member index; unclaimed points are -1.

    A member's probability is its lambda over the largest finite lambda in
    its cluster; exact duplicates (infinite lambda) get 1.0.
    """
    if n < min_cluster_size or n < 2:  # noqa: PLR2004
        return (
            CondensedTree((), n),
            ClusterAssignment((OUTLIER,) * n, 0, (0.0,) * n),
        )
    dendrogram = _Dendrogram(edges, n)
    if dendrogram.size[dendrogram.root] != n:
        msg = f"Edges do not connect all {n} points."
        raise ValueError(msg)
    rows = _condense(dendrogram, n, min_cluster_size)
    stability = _stabilities(rows, n)
    allow_root = allow_single_cluster and n >= min_cluster_size
    selected = _select_eom(rows, stability, n, allow_root)

    owner: dict[int, int | None] = {n: n if n in selected else None}
    point_parent = [n] * n
    point_lambda = [0.0] * n
    for row in rows:
        if row.child >= n:
            owner[row.child] = row.child if row.child in selected else owner[row.parent]
        else:
            point_parent[row.child] = row.parent
            point_lambda[row.child] = row.lambda_val

    members: dict[int, list[int]] = {c: [] for c in selected}
    for p in range(n):
        cluster = owner[point_parent[p]]
        if cluster is not None:
            members[cluster].append(p)
    lambda_max = {
        c: max(
            (point_lambda[p] for p in ps if point_lambda[p] != math.inf),
            default=0.0,
        )
        for c, ps in members.items()
    }

    def strength(p: int, cluster: int) -> float:
        if point_lambda[p] == math.inf:
            return 1.0
        top = lambda_max[cluster]
        return min(point_lambda[p], top) / top if top > 0 else 1.0

    if n in selected:
        threshold = single_cluster_min_probability
        kept = [p for p in members[n] if strength(p, n) >= threshold]
        members[n] = kept if len(kept) >= min_cluster_size else []

    labels = [OUTLIER] * n
    probabilities = [0.0] * n
    ordered = sorted((ps for ps in members.values() if ps), key=min)
    by_first = {ps[0]: c for c, ps in members.items() if ps}
    for label, ps in enumerate(ordered):
        cluster = by_first[ps[0]]
        for p in ps:
            labels[p] = label
            probabilities[p] = strength(p, cluster)
    tree = CondensedTree(tuple(rows), n, tuple(sorted(selected)), stability)
    return tree, ClusterAssignment(tuple(labels), len(ordered), tuple(probabilities))


def run_hdbscan(
    points: np.ndarray,
    cfg: HdbscanConfig = HdbscanConfig(),  # noqa: B008
    *,
    verbose: bool = False,
) -> tuple[CondensedTree, ClusterAssignment]:
    """Like `hdbscan`, but also return the condensed tree."""
    validate_hdbscan_config(cfg)
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if n < cfg.min_cluster_size:
        return condense_and_extract([], n, cfg.min_cluster_size)
    if verbose:
        print(f"🔍 Clustering {n} points (min_cluster_size={cfg.min_cluster_size})")
    mreach = mutual_reachability(pts, cfg.effective_min_samples)
    edges = build_mst(mreach)
    tree, assignment = condense_and_extract(
        edges,
        n,
        cfg.min_cluster_size,
        allow_single_cluster=cfg.allow_single_cluster,
        single_cluster_min_probability=cfg.single_cluster_min_probability,
    )
    if verbose:
        print(
            f"✅ Found {assignment.n_clusters} clusters"
            f" and {assignment.n_outliers} outliers",
        )
    return tree, assignment


def hdbscan(
    points: np.ndarray,
    cfg: HdbscanConfig = HdbscanConfig(),  # noqa: B008
) -> ClusterAssignment:
    """Cluster 2-D `points`; low-density points get the label -1."""
    return run_hdbscan(points, cfg)[1]
