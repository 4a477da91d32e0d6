"""ideatopic - Topic mining for brainstorming transcripts.

This module runs the full pipeline (ingest, embed, reduce, cluster, topics,
refinement and coherence) and persists every artifact with a manifest.
"""

from __future__ import annotations

import contextlib
import csv
import json
import os
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterator, NamedTuple, Sequence

import numpy as np

from ideatopic._cluster import ClusterAssignment, CondensedTree, run_hdbscan
from ideatopic._coherence import CoherenceReport, score_topic_set
from ideatopic._corpus import IdeaRecord, TokenizedIdea, ingest, tokenize_corpus
from ideatopic._dimred import umap_reduce
from ideatopic._embed import (
    EmbeddingMatrix,
    embed_texts,
    load_embedding_file,
    make_embedding_matrix,
    write_embedding_file,
)
from ideatopic._svg import emit_scatter_svg
from ideatopic._topics import (
    TopicSet,
    WordVectorCache,
    build_vocabularies,
    extract_topics,
    refine_topics,
    with_composition,
)
from ideatopic._version import __version__
from ideatopic.definitions import OUTLIER
from ideatopic.utils import (
    ConfigError,
    IdeaTopicError,
    StageError,
    sha256_file,
    sha256_json,
    warn,
)

if TYPE_CHECKING:
    from ideatopic._config import PipelineConfig

LOCK_NAME = ".ideatopic.lock"
MANIFEST = "manifest.json"
EMBEDDINGS = "embeddings.json"
COORDINATES = "coordinates.csv"
ASSIGNMENTS = "assignments.csv"
TOPICS = "topics.json"
TOPICS_MARKDOWN = "topics.md"
COHERENCE = "coherence.json"
CONDENSED_TREE = "condensed_tree.csv"
FIGURES = {
    "unclustered": "scatter-unclustered.svg",
    "clustered": "scatter-clustered.svg",
    "no-outliers": "scatter-no-outliers.svg",
}


class RunArtifacts(NamedTuple):
    """Paths of the files written by `run_pipeline`, plus the in-memory results."""

    out_dir: Path
    manifest: Path
    embeddings: Path
    coordinates: Path
    assignments: Path
    topics: Path
    topics_markdown: Path
    coherence: Path
    condensed_tree: Path
    figures: tuple[Path, ...]
    topic_set: TopicSet
    report: CoherenceReport | None


class Prepared(NamedTuple):
    """Stages that do not depend on the layout seed."""

    records: list[IdeaRecord]
    tokenized: list[TokenizedIdea]
    reference: list[tuple[str, ...]]
    embeddings: EmbeddingMatrix
    word_vectors: WordVectorCache
    input_sha256: str
    embedding_key: str


class Clustering(NamedTuple):
    coordinates: np.ndarray
    tree: CondensedTree
    assignment: ClusterAssignment
    topic_set: TopicSet


@contextlib.contextmanager
def stage(name: str) -> Iterator[None]:
    """Re-raise unexpected errors of a stage as `StageError`."""
    try:
        yield
    except (ConfigError, StageError, OSError):
        raise
    except (IdeaTopicError, ValueError, ArithmeticError, RuntimeError) as e:
        raise StageError(name, str(e)) from e


@contextlib.contextmanager
def output_lock(out_dir: Path) -> Iterator[Path]:
    """Hold an exclusive lock file in `out_dir` for the duration of a run."""
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        msg = f"❌ `{out_dir}` is in use by another run (remove `{lock}` if stale)."
        raise FileExistsError(msg) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield lock
    finally:
        lock.unlink(missing_ok=True)


def embedding_key(cfg: PipelineConfig, input_sha256: str) -> str:
    provider = cfg.provider
    source = (
        sha256_file(provider.path)
        if provider.kind == "file" and provider.path is not None
        else provider.endpoint
    )
    return sha256_json(
        {
            "input": input_sha256,
            "format": cfg.format,
            "provider": provider.kind,
            "dim": provider.dim,
            "seed": provider.seed,
            "source": source,
        },
    )


def _cached_embeddings(
    out_dir: Path,
    key: str,
    records: Sequence[IdeaRecord],
) -> EmbeddingMatrix | None:
    manifest, cache = out_dir / MANIFEST, out_dir / EMBEDDINGS
    if not manifest.exists() or not cache.exists():
        return None
    try:
        previous = json.loads(manifest.read_text(encoding="utf-8"))
        if previous.get("embedding_key") != key:
            return None
        if previous.get("artifacts", {}).get(EMBEDDINGS) != sha256_file(cache):
            return None
        vectors = load_embedding_file(cache)
        return make_embedding_matrix(
            [r.id for r in records],
            [vectors[r.text] for r in records],
        )
    except (ValueError, KeyError):
        return None


def prepare(cfg: PipelineConfig, *, verbose: bool = False) -> Prepared:
    """Ingest, preprocess and embed the input (using the cache when valid)."""
    with stage("ingest"):
        records = ingest(cfg.input, cfg.format)
        tokenized = tokenize_corpus(records, cfg.preprocess)
        if cfg.reference_corpus is not None:
            reference_records = ingest(cfg.reference_corpus, cfg.reference_format)
            reference_tokens = tokenize_corpus(reference_records, cfg.preprocess)
            reference = [t.tokens for t in reference_tokens]
        else:
            reference = [t.tokens for t in tokenized]
    needed = max(cfg.umap.n_neighbors, cfg.hdbscan.effective_min_samples) + 1
    if len(records) < needed:
        msg = (
            f"❌ `{cfg.input}` has {len(records)} ideas, but n_neighbors={cfg.umap.n_neighbors}"
            f" and min_samples={cfg.hdbscan.effective_min_samples} need at least {needed}."
        )
        raise ConfigError(msg)
    if verbose:
        print(f"📄 Read {len(records)} ideas from `{cfg.input}`")

    input_sha = sha256_file(cfg.input)
    key = embedding_key(cfg, input_sha)
    with stage("embed"):
        embeddings = _cached_embeddings(cfg.out, key, records)
        if embeddings is not None:
            if verbose:
                print(f"♻️  Reusing cached embeddings from `{cfg.out / EMBEDDINGS}`")
        else:
            if verbose:
                print(f"🧮 Embedding {len(records)} ideas with the `{cfg.provider.kind}` provider")
            embeddings = embed_texts(
                cfg.provider,
                [r.text for r in records],
                [r.id for r in records],
            )
    return Prepared(
        records,
        tokenized,
        reference,
        embeddings,
        WordVectorCache(cfg.provider),
        input_sha,
        key,
    )


def cluster_and_extract(
    cfg: PipelineConfig,
    prepared: Prepared,
    seed: int | None = None,
    *,
    verbose: bool = False,
) -> Clustering:
    """Reduce, cluster and extract topics; `seed` overrides the layout seed."""
    umap_cfg = cfg.umap if seed is None else cfg.umap._replace(seed=seed)
    with stage("reduce"):
        coordinates = umap_reduce(prepared.embeddings, umap_cfg, verbose=verbose)
    with stage("cluster"):
        tree, assignment = run_hdbscan(coordinates, cfg.hdbscan, verbose=verbose)
    with stage("topics"):
        vocabularies = build_vocabularies(
            assignment,
            prepared.tokenized,
            prepared.word_vectors,
            prepared.embeddings,
            verbose=verbose,
        )
        topic_set = extract_topics(assignment, vocabularies, cfg.k)
    return Clustering(coordinates, tree, assignment, topic_set)


def _write_csv(
    path: Path,
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
) -> None:
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, data: Any) -> None:
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def topics_to_dict(
    topic_set: TopicSet,
    assignment: ClusterAssignment,
) -> dict[str, Any]:
    return {
        "topics": [
            {
                "cluster_id": t.cluster_id,
                "words": [{"word": w, "score": s} for w, s in t.ranked_words],
                "member_ids": list(t.member_ids),
                "member_count": t.member_count,
                "vocabulary_size": t.vocabulary_size,
                "speakers": dict(t.speakers),
                "groups": dict(t.groups),
            }
            for t in topic_set.topics
        ],
        "outliers": [
            i for i, label in enumerate(assignment.labels) if label == OUTLIER
        ],
        "target_count": topic_set.target_count,
        "merges": [m._asdict() for m in topic_set.merges],
        "preserved": list(topic_set.preserved),
    }


def topics_markdown(topic_set: TopicSet, report: CoherenceReport | None) -> str:
    """Render the topics as a Markdown table with per-topic and overall coherence."""
    scores = {} if report is None else {t.id: t.score for t in report.per_topic}
    metric = "C_V" if report is None or report.metric == "c_v" else "C_NPMI"
    lines = [
        f"| Topic | Ideas | Words/Cluster | Top words | {metric} |",
        "|---:|---:|---:|---|---:|",
    ]
    for t in topic_set.topics:
        score = scores.get(t.cluster_id)
        shown = "n/a" if score is None else f"{score:.3f}"
        words = ", ".join(t.words) or "_(no words)_"
        lines.append(
            f"| {t.cluster_id} | {t.member_count} | {t.vocabulary_size} | {words} | {shown} |",
        )
    if report is not None and report.overall is not None:
        lines.append(f"\nOverall topic coherence ({metric}): {report.overall:.3f}")
    return "\n".join(lines) + "\n"


def _write_manifest(
    out_dir: Path,
    cfg: PipelineConfig,
    artifacts: Sequence[Path],
    *,
    input_sha256: str | None,
    key: str | None,
    error: StageError | OSError | None = None,
) -> Path:
    manifest = {
        "ideatopic_version": __version__,
        "status": "ok" if error is None else "failed",
        "failed_stage": getattr(error, "stage", None),
        "error": None if error is None else str(error),
        "config": cfg.to_dict(),
        "config_sha256": sha256_json(cfg.to_dict()),
        "input_sha256": input_sha256,
        "embedding_key": key,
        "artifacts": {p.name: sha256_file(p) for p in sorted(artifacts) if p.exists()},
    }
    path = out_dir / MANIFEST
    _write_json(path, manifest)
    return path


def write_run_outputs(  # noqa: PLR0913
    out_dir: Path,
    prepared: Prepared,
    clustering: Clustering,
    topic_set: TopicSet,
    report: CoherenceReport | None,
) -> dict[str, Path]:
    paths = {
        "coordinates": out_dir / COORDINATES,
        "assignments": out_dir / ASSIGNMENTS,
        "topics": out_dir / TOPICS,
        "topics_markdown": out_dir / TOPICS_MARKDOWN,
        "coherence": out_dir / COHERENCE,
        "condensed_tree": out_dir / CONDENSED_TREE,
    }
    ids = [r.id for r in prepared.records]
    coords = clustering.coordinates
    assignment = clustering.assignment
    _write_csv(
        paths["coordinates"],
        ("id", "x", "y"),
        [(i, repr(float(x)), repr(float(y))) for i, (x, y) in zip(ids, coords)],
    )
    _write_csv(
        paths["assignments"],
        ("id", "label", "probability"),
        [
            (i, label, repr(float(p)))
            for i, label, p in zip(ids, assignment.labels, assignment.probabilities)
        ],
    )
    _write_csv(
        paths["condensed_tree"],
        ("parent", "child", "lambda", "child_size"),
        [
            (r.parent, r.child, repr(float(r.lambda_val)), r.child_size)
            for r in clustering.tree.rows
        ],
    )
    _write_json(paths["topics"], topics_to_dict(topic_set, assignment))
    markdown = topics_markdown(topic_set, report)
    paths["topics_markdown"].write_text(markdown, encoding="utf-8")
    if report is None:
        empty = {"metric": None, "per_topic": [], "overall": None}
        _write_json(paths["coherence"], empty)
    else:
        _write_json(paths["coherence"], report.to_dict())
    for stage_name, filename in FIGURES.items():
        paths[filename] = emit_scatter_svg(
            coords,
            assignment.labels,
            stage_name,  # type: ignore[arg-type]
            out_dir / filename,
        )
    return paths


def run_pipeline(cfg: PipelineConfig, *, verbose: bool = False) -> RunArtifacts:
    """Run every stage and write the artifacts to `cfg.out`.

    A stage failure raises `StageError` after writing a manifest with status
    `failed`; artifacts written so far are kept.
    """
    out_dir = cfg.out
    written: list[Path] = []
    input_sha: str | None = None
    key: str | None = None
    with output_lock(out_dir):
        try:
            prepared = prepare(cfg, verbose=verbose)
            input_sha, key = prepared.input_sha256, prepared.embedding_key
            embeddings_path = out_dir / EMBEDDINGS
            write_embedding_file(
                embeddings_path,
                [r.text for r in prepared.records],
                prepared.embeddings,
            )
            written.append(embeddings_path)

            clustering = cluster_and_extract(cfg, prepared, verbose=verbose)
            topic_set = clustering.topic_set
            if cfg.target_topic_count is not None:
                with stage("refine"):
                    if cfg.target_topic_count > len(topic_set.topics):
                        warn(
                            f"⚠️  Found {len(topic_set.topics)} topics, fewer than the"
                            f" requested {cfg.target_topic_count}; skipping refinement.",
                        )
                    else:
                        topic_set = refine_topics(
                            topic_set,
                            cfg.target_topic_count,
                            preserve_threshold=cfg.preserve_threshold,
                            verbose=verbose,
                        )
            topic_set = with_composition(topic_set, prepared.records)
            report = None
            with stage("coherence"):
                if topic_set.topics:
                    report = score_topic_set(
                        topic_set,
                        prepared.reference,
                        cfg.coherence,
                    )
            paths = write_run_outputs(out_dir, prepared, clustering, topic_set, report)
            written.extend(paths.values())
        except (StageError, OSError) as e:
            _write_manifest(
                out_dir,
                cfg,
                written,
                input_sha256=input_sha,
                key=key,
                error=e,
            )
            raise
        manifest = _write_manifest(
            out_dir,
            cfg,
            written,
            input_sha256=input_sha,
            key=key,
        )
    if verbose:
        print(f"✅ Wrote {len(written) + 1} artifacts to `{out_dir}`")
    return RunArtifacts(
        out_dir=out_dir,
        manifest=manifest,
        embeddings=out_dir / EMBEDDINGS,
        coordinates=paths["coordinates"],
        assignments=paths["assignments"],
        topics=paths["topics"],
        topics_markdown=paths["topics_markdown"],
        coherence=paths["coherence"],
        condensed_tree=paths["condensed_tree"],
        figures=tuple(out_dir / name for name in FIGURES.values()),
        topic_set=topic_set,
        report=report,
    )
