"""Tests for the layered pipeline configuration."""

from __future__ import annotations

import textwrap
from pathlib import Path

import pytest

from ideatopic._config import (
    DEFAULTS,
    build_config,
    load_config_file,
    merge_layers,
)
from ideatopic.utils import ConfigError

from .helpers import write_lines


def test_defaults(tmp_path: Path) -> None:
    cfg = build_config({"input": str(tmp_path / "ideas.txt")})
    assert cfg.format == "plaintext"
    assert cfg.provider.kind == "hash"
    assert cfg.provider.dim == 64
    assert cfg.umap.n_neighbors == 15
    assert cfg.umap.min_dist == 0.1
    assert cfg.hdbscan.min_cluster_size == 5
    assert cfg.hdbscan.effective_min_samples == 5
    assert cfg.k == 10
    assert cfg.target_topic_count is None
    assert cfg.coherence.metric == "c_v"
    assert cfg.coherence.effective_window_size == 110
    assert cfg.out == Path("ideatopic-out")
    assert "the" in cfg.preprocess.stopwords


def test_one_seed_drives_every_stage(tmp_path: Path) -> None:
    cfg = build_config({"input": str(tmp_path / "x.txt"), "seed": 42})
    assert cfg.seed == 42
    assert cfg.umap.seed == 42
    assert cfg.provider.seed == 42


def test_yaml_file_and_flag_priority(tmp_path: Path) -> None:
    config = tmp_path / "ideatopic.yaml"
    config.write_text(
        textwrap.dedent(
            """\
            input: data/ideas.jsonl
            format: jsonl
            n_neighbors: 8
            min_dist: 1
            topics: 4
            coherence: c_npmi
            """,
        ),
    )
    cfg = build_config({"n_neighbors": 10, "k": None}, config)
    assert cfg.input == (tmp_path / "data" / "ideas.jsonl").resolve()
    assert cfg.format == "jsonl"
    assert cfg.umap.n_neighbors == 10
    assert cfg.umap.min_dist == 1.0
    assert isinstance(cfg.umap.min_dist, float)
    assert cfg.target_topic_count == 4
    assert cfg.coherence.effective_window_size == 10
    assert cfg.k == 10


def test_pyproject_table(tmp_path: Path) -> None:
    pyproject = tmp_path / "pyproject.toml"
    pyproject.write_text(
        textwrap.dedent(
            """\
            [project]
            name = "workshop"

            [tool.ideatopic]
            input = "ideas.txt"
            min_cluster_size = 8
            provider = "file"
            embedding_file = "vectors.json"
            """,
        ),
    )
    cfg = build_config(config_file=pyproject)
    assert cfg.hdbscan.min_cluster_size == 8
    assert cfg.provider.kind == "file"
    assert cfg.provider.path == (tmp_path / "vectors.json").resolve()


def test_empty_yaml_file(tmp_path: Path) -> None:
    config = tmp_path / "empty.yaml"
    config.write_text("")
    assert load_config_file(config) == {}


def test_stopwords_file(tmp_path: Path) -> None:
    stop = write_lines(tmp_path / "stop.txt", ["parking"])
    cfg = build_config({"input": "x.txt", "stopwords": str(stop)})
    assert cfg.preprocess.stopwords == frozenset({"parking"})
    assert cfg.stopwords_file == stop


@pytest.mark.parametrize(
    ("content", "match"),
    [
        ("colour: red\n", "Unknown configuration key `colour`"),
        ("n_neighbors: many\n", "must be of type int"),
        ("n_neighbors: true\n", "must be of type int"),
        ("k: [1, 2]\n", "must be a scalar"),
        ("- a\n- b\n", "mapping"),
        ("input: [unclosed\n", "Could not parse"),
    ],
)
def test_bad_config_files(tmp_path: Path, content: str, match: str) -> None:
    config = tmp_path / "bad.yaml"
    config.write_text(content)
    with pytest.raises(ConfigError, match=match):
        build_config({"input": "x.txt"}, config)


@pytest.mark.parametrize(
    ("flags", "match"),
    [
        ({}, "No input file"),
        ({"input": "x", "provider": "magic"}, "Invalid provider"),
        ({"input": "x", "provider": "file"}, "embedding_file"),
        ({"input": "x", "provider": "http"}, "endpoint"),
        ({"input": "x", "format": "csv"}, "Invalid input format"),
        ({"input": "x", "metric": "manhattan"}, "Invalid metric"),
        ({"input": "x", "n_neighbors": 1}, "n_neighbors"),
        ({"input": "x", "min_cluster_size": 1}, "min_cluster_size"),
        ({"input": "x", "coherence": "u_mass"}, "coherence metric"),
        ({"input": "x", "k": 0}, "`k`"),
        ({"input": "x", "topics": 0}, "`topics`"),
        ({"input": "x", "min_token_len": 0}, "min_token_len"),
        ({"input": "x", "dim": 1}, "dim"),
    ],
)
def test_invalid_settings_are_config_errors(flags: dict, match: str) -> None:
    with pytest.raises(ConfigError, match=match):
        build_config(flags)


def test_missing_config_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError, match="not found"):
        build_config({}, tmp_path / "nope.yaml")


def test_merge_layers_ignores_none() -> None:
    merged = merge_layers({"k": 5, "seed": 3}, {"k": None, "seed": 4})
    assert merged["k"] == 5
    assert merged["seed"] == 4
    assert merged["n_neighbors"] == DEFAULTS["n_neighbors"]


def test_to_dict_leaves_out_the_output_directory(tmp_path: Path) -> None:
    cfg = build_config({"input": "ideas.txt", "out": str(tmp_path / "run")})
    data = cfg.to_dict()
    assert "out" not in data
    assert data["input"] == "ideas.txt"
    assert data["window_size"] == 110
    assert data["min_samples"] == 5
