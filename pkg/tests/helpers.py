"""ideatopic tests."""

from __future__ import annotations

import math
from itertools import combinations, count
from pathlib import Path
from typing import Sequence

import numpy as np

REPO_ROOT = Path(__file__).parent.parent

# Spacing is a power of two so lattice distances are exact.
SPACING = 0.125


def lattice_blob(center: tuple[float, float], rows: int = 4, cols: int = 5) -> np.ndarray:
    x0, y0 = center
    return np.array(
        [[x0 + SPACING * i, y0 + SPACING * j] for i in range(rows) for j in range(cols)],
    )


def comembership(labels: Sequence[int]) -> np.ndarray:
    arr = np.asarray(labels)
    same = arr[:, None] == arr[None, :]
    clustered = arr >= 0
    return same & clustered[:, None] & clustered[None, :]


def same_partition(a: Sequence[int], b: Sequence[int]) -> bool:
    a_noise = [label < 0 for label in a]
    b_noise = [label < 0 for label in b]
    return a_noise == b_noise and bool((comembership(a) == comembership(b)).all())


def is_unit(vector: np.ndarray, tol: float = 1e-9) -> bool:
    return math.isclose(float(np.linalg.norm(vector)), 1.0, abs_tol=tol)


def brute_force_average_cosine(word: Sequence[float], sentences: Sequence[Sequence[float]]) -> float:
    total = 0.0
    for s in sentences:
        dot = sum(a * b for a, b in zip(word, s))
        nw = math.sqrt(sum(a * a for a in word))
        ns = math.sqrt(sum(b * b for b in s))
        total += 0.0 if nw == 0 or ns == 0 else dot / (nw * ns)
    return total / len(sentences)


def spanning_tree_weights(dist: np.ndarray) -> list[float]:
    """Total weight of every spanning tree of the complete graph on `dist`."""
    n = dist.shape[0]
    edges = list(combinations(range(n), 2))
    weights = []
    for chosen in combinations(edges, n - 1):
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for u, v in chosen:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            weights.append(sum(float(dist[u, v]) for u, v in chosen))
    return weights


def reference_mutual_reachability(points: np.ndarray, min_samples: int) -> list[list[float]]:
    pts = [tuple(map(float, p)) for p in points]
    n = len(pts)
    d = [[math.dist(pts[i], pts[j]) for j in range(n)] for i in range(n)]
    core = [sorted(d[i][j] for j in range(n) if j != i)[min_samples - 1] for i in range(n)]
    return [
        [0.0 if i == j else max(core[i], core[j], d[i][j]) for j in range(n)]
        for i in range(n)
    ]


def _components(points: list[int], dist: list[list[float]], below: float) -> list[list[int]]:
    remaining = set(points)
    out = []
    while remaining:
        start = min(remaining)
        remaining.discard(start)
        component, frontier = [start], [start]
        while frontier:
            a = frontier.pop()
            for b in sorted(remaining):
                if dist[a][b] < below:
                    remaining.discard(b)
                    component.append(b)
                    frontier.append(b)
        out.append(sorted(component))
    return sorted(out, key=min)


def _split_distance(points: list[int], dist: list[list[float]]) -> float:
    weights = sorted({dist[a][b] for a, b in combinations(points, 2)})
    for w in weights:
        if len(_components(points, dist, math.nextafter(w, math.inf))) == 1:
            return w
    raise AssertionError


def _probability(lam: float, top: float) -> float:
    if lam == math.inf:
        return 1.0
    return min(lam, top) / top if top > 0 else 1.0


def reference_hdbscan(  # noqa: C901
    points: np.ndarray,
    min_cluster_size: int,
    min_samples: int | None = None,
    *,
    allow_single_cluster: bool = True,
    min_probability: float = 0.05,
) -> list[int]:
    """HDBSCAN from the definitions: thresholded components, no spanning tree."""
    n = len(points)
    ms = min_cluster_size if min_samples is None else min_samples
    if n < min_cluster_size:
        return [-1] * n
    dist = reference_mutual_reachability(points, ms)

    clusters: dict[int, dict] = {}
    ids = count()

    def grow(cid: int, members: list[int], birth: float) -> None:
        node = {"members": members, "birth": birth, "points": {}, "children": []}
        clusters[cid] = node
        current = members
        while len(current) > 1:
            d = _split_distance(current, dist)
            lam = math.inf if d == 0 else 1.0 / d
            kids = _components(current, dist, d)
            big = [k for k in kids if len(k) >= min_cluster_size]
            if len(big) >= 2:
                for kid in kids:
                    if len(kid) >= min_cluster_size:
                        node["children"].append((next(ids), kid, lam))
                    else:
                        node["points"].update({p: lam for p in kid})
                break
            for kid in kids:
                if len(kid) < min_cluster_size:
                    node["points"].update({p: lam for p in kid})
            if not big:
                break
            current = big[0]
        for child, kid, lam in node["children"]:
            grow(child, kid, lam)

    grow(-1, list(range(n)), 0.0)

    def gap(lam: float, birth: float) -> float:
        return 0.0 if lam == birth else lam - birth

    def stability(cid: int) -> float:
        node = clusters[cid]
        terms = [gap(lam, node["birth"]) for lam in node["points"].values()]
        terms += [gap(lam, node["birth"]) * len(kid) for _, kid, lam in node["children"]]
        return math.fsum(terms)

    def select(cid: int) -> tuple[float, list[int]]:
        node = clusters[cid]
        if not node["children"]:
            return stability(cid), [cid]
        parts = [select(child) for child, _, _ in node["children"]]
        below = math.fsum(p[0] for p in parts)
        chosen = [c for p in parts for c in p[1]]
        if stability(cid) > below:
            return stability(cid), [cid]
        return below, chosen

    if allow_single_cluster:
        selected = select(-1)[1]
    else:
        selected = [c for child, _, _ in clusters[-1]["children"] for c in select(child)[1]]

    def fall_out(cid: int) -> dict[int, float]:
        node = clusters[cid]
        out = dict(node["points"])
        for child, _, _ in node["children"]:
            out.update(fall_out(child))
        return out

    labels = [-1] * n
    groups = []
    for cid in selected:
        lambdas = fall_out(cid)
        members = sorted(lambdas)
        if cid == -1:
            top = max((lam for lam in lambdas.values() if lam != math.inf), default=0.0)
            members = [p for p in members if _probability(lambdas[p], top) >= min_probability]
            if len(members) < min_cluster_size:
                members = []
        if members:
            groups.append(members)
    for label, members in enumerate(sorted(groups, key=min)):
        for p in members:
            labels[p] = label
    return labels


def write_lines(path: Path, lines: Sequence[str]) -> Path:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
