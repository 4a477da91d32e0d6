"""ideatopic - Topic mining for brainstorming transcripts.

This module provides the pipeline configuration: built-in defaults, a flat
YAML file or a `[tool.ideatopic]` table in `pyproject.toml`, and command-line
flags, in increasing priority.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, NamedTuple

from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from ideatopic._cluster import HdbscanConfig, validate_hdbscan_config
from ideatopic._coherence import CoherenceConfig, validate_coherence_config
from ideatopic._corpus import PreprocessConfig, load_stopwords
from ideatopic._dimred import UmapConfig
from ideatopic._embed import EmbeddingProvider
from ideatopic.definitions import (
    InitKind,
    InputFormat,
    Metric,
    ProviderKind,
    normalize_format,
    validate_choice,
)
from ideatopic.utils import ConfigError, load_toml_table

# key -> accepted scalar type
CONFIG_KEYS: dict[str, type] = {
    "input": str,
    "format": str,
    "provider": str,
    "dim": int,
    "embedding_file": str,
    "endpoint": str,
    "batch_size": int,
    "stopwords": str,
    "min_token_len": int,
    "alphabetic_only": bool,
    "lowercase": bool,
    "n_neighbors": int,
    "min_dist": float,
    "n_epochs": int,
    "negative_sample_rate": int,
    "metric": str,
    "init": str,
    "min_cluster_size": int,
    "min_samples": int,
    "k": int,
    "topics": int,
    "preserve_threshold": float,
    "coherence": str,
    "top_n": int,
    "window_size": int,
    "epsilon": float,
    "reference_corpus": str,
    "reference_format": str,
    "out": str,
    "seed": int,
}
PATH_KEYS = ("input", "embedding_file", "stopwords", "reference_corpus", "out")

DEFAULTS: dict[str, Any] = {
    "format": "plaintext",
    "provider": "hash",
    "dim": 64,
    "batch_size": 32,
    "min_token_len": 2,
    "alphabetic_only": True,
    "lowercase": True,
    "n_neighbors": 15,
    "min_dist": 0.1,
    "n_epochs": 200,
    "negative_sample_rate": 5,
    "metric": "cosine",
    "init": "random",
    "min_cluster_size": 5,
    "k": 10,
    "coherence": "c_v",
    "top_n": 10,
    "epsilon": 1e-12,
    "reference_format": "plaintext",
    "out": "ideatopic-out",
    "seed": 0,
}


class PipelineConfig(NamedTuple):
    """Everything one pipeline run needs; one seed drives every stochastic stage."""

    input: Path
    format: InputFormat
    provider: EmbeddingProvider
    preprocess: PreprocessConfig
    umap: UmapConfig
    hdbscan: HdbscanConfig
    k: int
    target_topic_count: int | None
    preserve_threshold: float | None
    coherence: CoherenceConfig
    out: Path
    seed: int
    reference_corpus: Path | None = None
    reference_format: InputFormat = "plaintext"
    stopwords_file: Path | None = None

    def to_dict(self) -> dict[str, Any]:
        """Flat, JSON-friendly view (the output directory is left out)."""
        provider = self.provider
        return {
            "input": str(self.input),
            "format": self.format,
            "provider": provider.kind,
            "dim": provider.dim,
            "embedding_file": None if provider.path is None else str(provider.path),
            "endpoint": provider.endpoint,
            "batch_size": provider.batch_size,
            "stopwords": (
                None if self.stopwords_file is None else str(self.stopwords_file)
            ),
            "min_token_len": self.preprocess.min_token_len,
            "alphabetic_only": self.preprocess.alphabetic_only,
            "lowercase": self.preprocess.lowercase,
            "n_neighbors": self.umap.n_neighbors,
            "min_dist": self.umap.min_dist,
            "n_epochs": self.umap.n_epochs,
            "negative_sample_rate": self.umap.negative_sample_rate,
            "metric": self.umap.metric,
            "init": self.umap.init,
            "min_cluster_size": self.hdbscan.min_cluster_size,
            "min_samples": self.hdbscan.effective_min_samples,
            "k": self.k,
            "topics": self.target_topic_count,
            "preserve_threshold": self.preserve_threshold,
            "coherence": self.coherence.metric,
            "top_n": self.coherence.top_n,
            "window_size": self.coherence.effective_window_size,
            "epsilon": self.coherence.epsilon,
            "reference_corpus": (
                None if self.reference_corpus is None else str(self.reference_corpus)
            ),
            "reference_format": self.reference_format,
            "seed": self.seed,
        }


def _check_value(key: str, value: Any, source: str) -> Any:
    if key not in CONFIG_KEYS:
        msg = f"❌ Unknown configuration key `{key}` in {source}."
        raise ConfigError(msg)
    expected = CONFIG_KEYS[key]
    if value is None:
        return None
    if isinstance(value, (dict, list)):
        msg = f"❌ Configuration key `{key}` in {source} must be a scalar."
        raise ConfigError(msg)
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if expected is int and isinstance(value, bool):
        ok = False
    else:
        ok = isinstance(value, expected)
    if not ok:
        msg = (
            f"❌ Configuration key `{key}` in {source} must be of type"
            f" {expected.__name__}, got {value!r}."
        )
        raise ConfigError(msg)
    return value


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a flat YAML mapping or the `[tool.ideatopic]` table of a TOML file.

    Relative paths in the file are resolved against the file's directory.
    """
    path = Path(path)
    if not path.exists():
        msg = f"Config file `{path}` not found."
        raise FileNotFoundError(msg)
    if path.suffix == ".toml":
        data: Any = load_toml_table(path)
    else:
        yaml = YAML(typ="safe")
        try:
            with path.open(encoding="utf-8") as f:
                data = yaml.load(f)
        except YAMLError as e:
            msg = f"❌ Could not parse `{path}`: {e}"
            raise ConfigError(msg) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        msg = f"❌ `{path}` must contain a `key: value` mapping."
        raise ConfigError(msg)
    values = {}
    for key, value in data.items():
        checked = _check_value(str(key), value, f"`{path}`")
        if key in PATH_KEYS and checked is not None:
            checked = str((path.parent / checked).resolve())
        values[str(key)] = checked
    return values


def merge_layers(*layers: dict[str, Any]) -> dict[str, Any]:
    """Merge config layers; later layers win and `None` never overrides."""
    merged: dict[str, Any] = dict(DEFAULTS)
    for layer in layers:
        merged.update({k: v for k, v in layer.items() if v is not None})
    return merged


def build_config(
    flags: dict[str, Any] | None = None,
    config_file: str | Path | None = None,
) -> PipelineConfig:
    """Build a validated `PipelineConfig` from a config file and flag overrides.

    Raises `ConfigError` for any invalid or missing setting.
    """
    file_values = load_config_file(config_file) if config_file is not None else {}
    flag_values = {
        key: _check_value(key, value, "the command-line flags")
        for key, value in (flags or {}).items()
    }
    values = merge_layers(file_values, flag_values)
    try:
        return _from_values(values)
    except ConfigError:
        raise
    except ValueError as e:
        msg = f"❌ Invalid configuration: {e}"
        raise ConfigError(msg) from e


def _from_values(v: dict[str, Any]) -> PipelineConfig:
    if v.get("input") is None:
        msg = "❌ No input file given (`input` key or `--input` flag)."
        raise ConfigError(msg)
    provider_kind: ProviderKind = validate_choice(  # type: ignore[assignment]
        v["provider"],
        ProviderKind,
        "provider",
    )
    if provider_kind == "file" and v.get("embedding_file") is None:
        msg = "❌ The `file` provider needs `embedding_file`."
        raise ConfigError(msg)
    if provider_kind == "http" and v.get("endpoint") is None:
        msg = "❌ The `http` provider needs `endpoint`."
        raise ConfigError(msg)
    seed = v["seed"]
    provider = EmbeddingProvider(
        kind=provider_kind,
        dim=v["dim"],
        seed=seed,
        path=None if v.get("embedding_file") is None else Path(v["embedding_file"]),
        endpoint=v.get("endpoint"),
        batch_size=v["batch_size"],
    )
    if provider.dim < 2 or provider.batch_size < 1:  # noqa: PLR2004
        msg = "`dim` must be >= 2 and `batch_size` >= 1."
        raise ValueError(msg)
    stopwords_file = None if v.get("stopwords") is None else Path(v["stopwords"])
    preprocess = PreprocessConfig.create(
        None if stopwords_file is None else load_stopwords(stopwords_file),
        min_token_len=v["min_token_len"],
        alphabetic_only=v["alphabetic_only"],
        lowercase=v["lowercase"],
    )
    metric: Metric = validate_choice(v["metric"], Metric, "metric")  # type: ignore[assignment]
    init: InitKind = validate_choice(v["init"], InitKind, "init")  # type: ignore[assignment]
    umap = UmapConfig(
        n_neighbors=v["n_neighbors"],
        min_dist=v["min_dist"],
        n_epochs=v["n_epochs"],
        negative_sample_rate=v["negative_sample_rate"],
        metric=metric,
        seed=seed,
        init=init,
    )
    if umap.n_neighbors < 2 or umap.min_dist <= 0 or umap.n_epochs < 1:  # noqa: PLR2004
        msg = "need `n_neighbors` >= 2, `min_dist` > 0 and `n_epochs` >= 1."
        raise ValueError(msg)
    hdbscan = HdbscanConfig(v["min_cluster_size"], v.get("min_samples"))
    validate_hdbscan_config(hdbscan)
    coherence = CoherenceConfig(
        v["coherence"],
        v["top_n"],
        v.get("window_size"),
        v["epsilon"],
    )
    validate_coherence_config(coherence)
    if v["k"] < 1:
        msg = f"`k` must be >= 1, got {v['k']}."
        raise ValueError(msg)
    if v.get("topics") is not None and v["topics"] < 1:
        msg = f"`topics` must be >= 1, got {v['topics']}."
        raise ValueError(msg)
    return PipelineConfig(
        input=Path(v["input"]),
        format=normalize_format(v["format"]),
        provider=provider,
        preprocess=preprocess,
        umap=umap,
        hdbscan=hdbscan,
        k=v["k"],
        target_topic_count=v.get("topics"),
        preserve_threshold=v.get("preserve_threshold"),
        coherence=coherence,
        out=Path(v["out"]),
        seed=seed,
        reference_corpus=(
            None if v.get("reference_corpus") is None else Path(v["reference_corpus"])
        ),
        reference_format=normalize_format(v["reference_format"]),
        stopwords_file=stopwords_file,
    )
