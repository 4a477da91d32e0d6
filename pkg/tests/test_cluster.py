"""Tests for the HDBSCAN clustering."""

from __future__ import annotations

import numpy as np
import pytest

from ideatopic._cluster import (
    HdbscanConfig,
    build_mst,
    condense_and_extract,
    hdbscan,
    mutual_reachability,
    run_hdbscan,
    validate_hdbscan_config,
)

from .helpers import (
    lattice_blob,
    reference_hdbscan,
    reference_mutual_reachability,
    same_partition,
    spanning_tree_weights,
)

ISOLATED = np.array([[30.0, 0.0], [0.0, 30.0], [-30.0, -30.0]])


def _two_blobs() -> np.ndarray:
    return np.vstack([lattice_blob((0.0, 0.0)), lattice_blob((10.0, 0.0))])


def test_mutual_reachability_examples() -> None:
    line = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    mreach = mutual_reachability(line, 1)
    assert mreach[0, 1] == 1.0
    assert mreach[0, 2] == 2.0
    assert mreach.diagonal().tolist() == [0.0, 0.0, 0.0]

    five = np.array([[float(i), 0.0] for i in range(5)])
    mreach = mutual_reachability(five, 2)
    # cores are [2, 1, 1, 1, 2]
    assert mreach[0, 1] == 2.0
    assert mreach[1, 2] == 1.0
    assert mreach[3, 4] == 2.0


def test_mutual_reachability_dominates_distance() -> None:
    rng = np.random.default_rng(1)
    points = rng.normal(size=(15, 2))
    mreach = mutual_reachability(points, 3)
    dist = np.linalg.norm(points[:, None] - points[None, :], axis=-1)
    assert (mreach >= dist - 1e-12).all()
    assert np.allclose(mreach, reference_mutual_reachability(points, 3))
    assert (mreach == mreach.T).all()


def test_mutual_reachability_needs_enough_points() -> None:
    with pytest.raises(ValueError, match="min_samples=3"):
        mutual_reachability(np.zeros((3, 2)), 3)
    with pytest.raises(ValueError, match=">= 1"):
        mutual_reachability(np.zeros((3, 2)), 0)


def test_mst_examples() -> None:
    dist = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 2.0], [5.0, 2.0, 0.0]])
    assert build_mst(dist) == [(0, 1, 1.0), (1, 2, 2.0)]
    assert build_mst(np.array([[0.0, 3.0], [3.0, 0.0]])) == [(0, 1, 3.0)]
    assert build_mst(np.zeros((1, 1))) == []


def test_mst_ties_use_endpoint_order() -> None:
    dist = np.ones((4, 4)) - np.eye(4)
    assert build_mst(dist) == [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]


@pytest.mark.parametrize("seed", range(20))
def test_mst_is_minimal(seed: int) -> None:
    rng = np.random.default_rng(seed)
    n = 3 + seed % 5
    points = rng.uniform(size=(n, 2))
    dist = np.linalg.norm(points[:, None] - points[None, :], axis=-1)
    edges = build_mst(dist)
    assert len(edges) == n - 1
    assert all(e.u < e.v for e in edges)
    assert [e.weight for e in edges] == sorted(e.weight for e in edges)
    total = sum(e.weight for e in edges)
    assert total == pytest.approx(min(spanning_tree_weights(dist)), abs=1e-12)


def test_two_blobs() -> None:
    assignment = hdbscan(_two_blobs(), HdbscanConfig(min_cluster_size=5))
    assert assignment.n_clusters == 2
    assert assignment.n_outliers == 0
    assert assignment.labels == (0,) * 20 + (1,) * 20


def test_two_blobs_with_isolated_points() -> None:
    points = np.vstack([_two_blobs(), ISOLATED])
    assignment = hdbscan(points, HdbscanConfig(min_cluster_size=5))
    assert assignment.n_clusters == 2
    assert assignment.n_outliers == 3
    assert assignment.labels[-3:] == (-1, -1, -1)
    assert assignment.probabilities[-3:] == (0.0, 0.0, 0.0)


def test_single_blob_is_one_cluster() -> None:
    assignment = hdbscan(lattice_blob((0.0, 0.0), rows=5, cols=6))
    assert assignment.n_clusters == 1
    assert set(assignment.labels) == {0}


def test_single_cluster_can_be_disallowed() -> None:
    points = lattice_blob((0.0, 0.0), rows=5, cols=6)
    cfg = HdbscanConfig(allow_single_cluster=False)
    labels = hdbscan(points, cfg).labels
    assert labels == tuple(reference_hdbscan(points, 5, allow_single_cluster=False))


def test_too_few_points_are_noise() -> None:
    points = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    assignment = hdbscan(points, HdbscanConfig(min_cluster_size=5))
    assert assignment.labels == (-1, -1, -1, -1)
    assert assignment.n_clusters == 0


def test_hdbscan_is_deterministic_and_permutation_invariant() -> None:
    points = np.vstack([_two_blobs(), ISOLATED])
    first = hdbscan(points)
    assert hdbscan(points) == first
    order = np.random.default_rng(7).permutation(len(points))
    shuffled = hdbscan(points[order])
    restored = [0] * len(points)
    for new_pos, old_pos in enumerate(order):
        restored[old_pos] = shuffled.labels[new_pos]
    assert same_partition(first.labels, restored)


def _random_dataset(rng: np.random.Generator) -> np.ndarray:
    n_blobs = int(rng.integers(1, 4))
    parts = [
        rng.normal(rng.uniform(-10, 10, size=2), rng.uniform(0.2, 1.0), size=(int(rng.integers(8, 14)), 2))
        for _ in range(n_blobs)
    ]
    parts.append(rng.uniform(-15, 15, size=(int(rng.integers(0, 6)), 2)))
    points = np.vstack(parts)
    return points[:40]


@pytest.mark.parametrize("seed", range(50))
def test_matches_reference_implementation(seed: int) -> None:
    rng = np.random.default_rng(1000 + seed)
    points = _random_dataset(rng)
    mcs = int(rng.integers(3, 7))
    tree, assignment = run_hdbscan(points, HdbscanConfig(min_cluster_size=mcs))
    expected = reference_hdbscan(points, mcs)
    assert same_partition(assignment.labels, expected)
    for label in range(assignment.n_clusters):
        assert len(assignment.members(label)) >= mcs
    assert all(0.0 <= p <= 1.0 for p in assignment.probabilities)
    assert set(tree.stability) >= set(tree.selected)


def test_condensed_tree_layout() -> None:
    points = np.vstack([_two_blobs(), ISOLATED])
    n = len(points)
    tree, _ = run_hdbscan(points)
    assert tree.n_points == n
    assert tree.rows[0].parent == n
    seen = {n}
    for row in tree.rows:
        assert row.parent in seen
        if row.child >= n:
            seen.add(row.child)
            assert row.child_size >= 5
        else:
            assert row.child_size == 1
    assert all(tree.stability[c] >= 0.0 for c in tree.selected)


def test_condense_rejects_disconnected_edges() -> None:
    with pytest.raises(ValueError, match="do not connect"):
        condense_and_extract([(0, 1, 1.0)], 6, 2)


def test_min_samples_changes_core_distances() -> None:
    points = np.vstack([_two_blobs(), ISOLATED])
    cfg = HdbscanConfig(min_cluster_size=5, min_samples=2)
    assert cfg.effective_min_samples == 2
    assignment = hdbscan(points, cfg)
    assert same_partition(assignment.labels, reference_hdbscan(points, 5, 2))


@pytest.mark.parametrize(
    ("cfg", "match"),
    [
        (HdbscanConfig(min_cluster_size=1), "min_cluster_size"),
        (HdbscanConfig(min_samples=0), "min_samples"),
        (HdbscanConfig(single_cluster_min_probability=1.5), "single_cluster_min_probability"),
    ],
)
def test_validate_hdbscan_config(cfg: HdbscanConfig, match: str) -> None:
    with pytest.raises(ValueError, match=match):
        validate_hdbscan_config(cfg)


def test_verbose(capsys: pytest.CaptureFixture) -> None:
    run_hdbscan(_two_blobs(), verbose=True)
    assert "Found 2 clusters and 0 outliers" in capsys.readouterr().out


def test_duplicates_do_not_zero_other_members_probabilities() -> None:
    edges = [(i, i + 1, 0.0) for i in range(7)]
    edges += [(0, 8, 0.25), (8, 9, 0.5), (9, 10, 1.0)]
    edges += [(i, i + 1, 0.1) for i in range(11, 18)]
    edges += [(0, 11, 10.0)]
    _, assignment = condense_and_extract(edges, 19, 5)
    assert assignment.labels == (0,) * 11 + (1,) * 8
    assert assignment.probabilities[:8] == (1.0,) * 8
    assert assignment.probabilities[8:11] == (1.0, 0.5, 0.25)
    assert assignment.probabilities[11:] == (1.0,) * 8


def test_single_cluster_keeps_points_next_to_duplicates() -> None:
    points = np.vstack([np.zeros((8, 2)), np.tile([0.5, 0.0], (3, 1))])
    assignment = hdbscan(points, HdbscanConfig(min_cluster_size=5))
    assert assignment.labels == (0,) * 11
    assert assignment.probabilities == (1.0,) * 11
