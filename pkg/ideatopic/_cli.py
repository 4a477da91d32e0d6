#!/usr/bin/env python3
"""ideatopic - Topic mining for brainstorming transcripts.

This module provides the `ideatopic` command-line tool.
"""

from __future__ import annotations

import argparse
import csv
import importlib.util
import sys
from pathlib import Path
from typing import Any, Sequence, get_args

from ideatopic._config import build_config
from ideatopic._pipeline import ASSIGNMENTS, COORDINATES, run_pipeline
from ideatopic._svg import emit_scatter_svg
from ideatopic._sweep import SweepReport, sweep_topics, write_sweep
from ideatopic._synthetic import generate_planted_corpus, write_jsonl
from ideatopic._version import __version__
from ideatopic.definitions import (
    FORMAT_ALIASES,
    CoherenceMetric,
    InitKind,
    Metric,
    PlotStage,
    ProviderKind,
)
from ideatopic.utils import ConfigError, StageError, get_package_version, parse_int_list

try:  # pragma: no cover
    from rich_argparse import RichHelpFormatter

    class _HelpFormatter(RichHelpFormatter):
        def _get_help_string(self, action: argparse.Action) -> str | None:
            # escapes "[" in text, otherwise e.g., [0, 1] is removed
            if action.help is not None:
                return action.help.replace("[", r"\[")
            return None
except ImportError:  # pragma: no cover
    from argparse import HelpFormatter as _HelpFormatter  # type: ignore[assignment]

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_STAGE = 4

# (flag, config key, type, help); defaults live in the config layer
_PIPELINE_FLAGS: tuple[tuple[str, str, Any, str], ...] = (
    ("--format", "format", str, "Input format: `jsonl` or `text`, by default `text`"),
    ("--provider", "provider", str, "Embedding provider, by default `hash`"),
    ("--dim", "dim", int, "Dimension of the `hash` provider vectors, by default 64"),
    ("--embedding-file", "embedding_file", str, "JSON file for the `file` provider"),
    ("--endpoint", "endpoint", str, "URL of the `http` embedding service"),
    ("--batch-size", "batch_size", int, "Texts per embedding request, by default 32"),
    ("--stopwords", "stopwords", str, "Stopword file (one word per line)"),
    ("--min-token-len", "min_token_len", int, "Shortest token kept, by default 2"),
    ("--n-neighbors", "n_neighbors", int, "UMAP neighbourhood size, by default 15"),
    ("--min-dist", "min_dist", float, "UMAP minimum distance, by default 0.1"),
    ("--n-epochs", "n_epochs", int, "UMAP optimisation epochs, by default 200"),
    (
        "--negative-sample-rate",
        "negative_sample_rate",
        int,
        "Negative samples per edge, by default 5",
    ),
    ("--metric", "metric", str, "kNN metric: `cosine` or `euclidean`"),
    ("--init", "init", str, "Layout initialisation: `random` or `spectral`"),
    ("--min-cluster-size", "min_cluster_size", int, "Smallest cluster, by default 5"),
    ("--min-samples", "min_samples", int, "Core-distance neighbour, by default 5"),
    ("--k", "k", int, "Top words kept per topic, by default 10"),
    ("--topics", "topics", int, "Refine the topics down to this count"),
    (
        "--preserve-threshold",
        "preserve_threshold",
        float,
        "Keep topics less similar than this",
    ),
    ("--coherence", "coherence", str, "Coherence metric: `c_v` or `c_npmi`"),
    ("--top-n", "top_n", int, "Topic words scored for coherence, by default 10"),
    ("--window-size", "window_size", int, "Sliding window, by default 110 or 10"),
    ("--epsilon", "epsilon", float, "NPMI log smoothing, by default 1e-12"),
    (
        "--reference-corpus",
        "reference_corpus",
        str,
        "Score coherence against this corpus",
    ),
    ("--reference-format", "reference_format", str, "Format of the reference corpus"),
    ("--seed", "seed", int, "Seed for every stochastic stage, by default 0"),
)
_CHOICES = {
    "format": sorted(FORMAT_ALIASES),
    "reference_format": sorted(FORMAT_ALIASES),
    "provider": get_args(ProviderKind),
    "metric": get_args(Metric),
    "init": get_args(InitKind),
    "coherence": get_args(CoherenceMetric),
}


def _add_pipeline_args(sub_parser: argparse.ArgumentParser) -> None:
    sub_parser.add_argument(
        "-i",
        "--input",
        type=str,
        default=None,
        help="The ideas file, one idea per line (text) or per JSON object (jsonl)",
    )
    sub_parser.add_argument(
        "-o",
        "--out",
        type=str,
        default=None,
        help="Output directory for the artifacts, by default `ideatopic-out`",
    )
    sub_parser.add_argument(
        "-c",
        "--config",
        type=Path,
        default=None,
        help="A flat YAML config file or a `pyproject.toml` with `[tool.ideatopic]`;"
        " flags override its values",
    )
    for flag, key, kind, help_msg in _PIPELINE_FLAGS:
        sub_parser.add_argument(
            flag,
            dest=key,
            type=kind,
            default=None,
            choices=_CHOICES.get(key),
            help=help_msg,
        )
    sub_parser.add_argument(
        "--alphabetic-only",
        dest="alphabetic_only",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Drop tokens containing non-letters, by default on",
    )
    sub_parser.add_argument(
        "--lowercase",
        dest="lowercase",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Lowercase tokens, by default on",
    )
    sub_parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Print verbose output",
    )


def _parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Topic mining for brainstorming transcripts.",
        formatter_class=_HelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", help="Subcommands")

    run_help = (
        "Embed, reduce, cluster and extract topics from an ideas file and write"
        " all artifacts (topics, coherence, scatter plots, manifest)."
    )
    parser_run = subparsers.add_parser(
        "run",
        help=run_help,
        description=run_help
        + " Example usage:"
        " `ideatopic run --input ideas.jsonl --format jsonl --topics 4`",
        formatter_class=_HelpFormatter,
    )
    _add_pipeline_args(parser_run)

    sweep_help = (
        "Refine the topics to several counts over repeated runs and report the"
        " average C_V and C_NPMI per count."
    )
    parser_sweep = subparsers.add_parser(
        "sweep",
        help=sweep_help,
        description=sweep_help,
        formatter_class=_HelpFormatter,
    )
    _add_pipeline_args(parser_sweep)
    parser_sweep.add_argument(
        "--counts",
        type=str,
        default="2,4,6,8,10",
        help="Comma-separated topic counts, by default `2,4,6,8,10`",
    )
    parser_sweep.add_argument(
        "--runs",
        type=int,
        default=3,
        help="Runs per count, by default 3",
    )

    plot_help = "Draw a scatter plot from the artifacts of a previous `run`."
    parser_plot = subparsers.add_parser(
        "plot",
        help=plot_help,
        description=plot_help,
        formatter_class=_HelpFormatter,
    )
    parser_plot.add_argument(
        "--stage",
        choices=get_args(PlotStage),
        default="clustered",
        help="Which plot to draw, by default `clustered`",
    )
    parser_plot.add_argument(
        "-o",
        "--out",
        type=Path,
        default=Path("ideatopic-out"),
        help="The run's output directory, by default `ideatopic-out`",
    )
    parser_plot.add_argument(
        "--output",
        type=Path,
        default=None,
        help="SVG file to write, by default `<out>/scatter-<stage>.svg`",
    )

    synth_help = "Write a synthetic ideas file with planted themes (JSONL)."
    parser_synth = subparsers.add_parser(
        "synth",
        help=synth_help,
        description=synth_help,
        formatter_class=_HelpFormatter,
    )
    parser_synth.add_argument(
        "--output",
        type=Path,
        default=Path("ideas.jsonl"),
        help="Output file, by default `ideas.jsonl`",
    )
    parser_synth.add_argument(
        "--n-ideas",
        type=int,
        default=200,
        help="Number of ideas, by default 200",
    )
    parser_synth.add_argument(
        "--themes",
        type=int,
        default=4,
        help="Number of themes, by default 4",
    )
    parser_synth.add_argument(
        "--seed",
        type=int,
        default=0,
        help="Random seed, by default 0",
    )

    subparsers.add_parser(
        "version",
        help="Print version information of ideatopic.",
        formatter_class=_HelpFormatter,
    )

    args = parser.parse_args(argv)
    if args.command is None:  # pragma: no cover
        parser.print_help()
        sys.exit(1)
    return args


def _flags(args: argparse.Namespace) -> dict[str, Any]:
    keys = ["input", "out", "alphabetic_only", "lowercase"]
    keys += [key for _, key, _, _ in _PIPELINE_FLAGS]
    return {key: getattr(args, key) for key in keys}


def _rich_available() -> bool:
    return importlib.util.find_spec("rich") is not None


def _print_table(
    title: str,
    header: Sequence[str],
    rows: Sequence[Sequence[str]],
) -> None:
    """Print a table using rich if it's installed, otherwise as plain text."""
    if _rich_available():
        from rich.console import Console
        from rich.table import Table

        table = Table(title=title)
        for column in header:
            table.add_column(column)
        for row in rows:
            table.add_row(*row)
        Console().print(table)
        return
    print(title)
    print(" | ".join(header))
    for row in rows:
        print(" | ".join(row))


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.3f}"


def _run_command(args: argparse.Namespace) -> None:
    cfg = build_config(_flags(args), args.config)
    artifacts = run_pipeline(cfg, verbose=args.verbose)
    report = artifacts.report
    scores = {} if report is None else {t.id: t.score for t in report.per_topic}
    rows = [
        (
            str(t.cluster_id),
            str(t.vocabulary_size),
            ", ".join(t.words),
            _fmt(scores.get(t.cluster_id)),
        )
        for t in artifacts.topic_set.topics
    ]
    metric = cfg.coherence.metric.upper()
    if report is not None:
        rows.append(("Overall", "", "", _fmt(report.overall)))
    _print_table("Topics", ("Topic", "Words/Cluster", "Top words", metric), rows)
    print(f"✅ Artifacts written to `{artifacts.out_dir}`")


def _print_sweep(report: SweepReport) -> None:
    rows = [(str(r.count), _fmt(r.c_v), _fmt(r.c_npmi), r.status) for r in report.rows]
    n_runs = len(report.stored_runs)
    rows.append(("Mean", _fmt(report.c_v), _fmt(report.c_npmi), f"{n_runs} runs"))
    header = ("Topics", "TC(C_V)", "TC(C_NPMI)", "Status")
    _print_table("Topic-count sweep", header, rows)


def _sweep_command(args: argparse.Namespace) -> None:
    try:
        counts = parse_int_list(args.counts)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    cfg = build_config(_flags(args), args.config)
    try:
        report = sweep_topics(cfg, counts, args.runs, verbose=args.verbose)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    path = write_sweep(report, cfg.out)
    _print_sweep(report)
    print(f"✅ Sweep written to `{path}`")


def _read_run_csv(path: Path, columns: Sequence[str]) -> list[list[str]]:
    if not path.exists():
        msg = f"❌ `{path}` not found; run `ideatopic run` first."
        raise FileNotFoundError(msg)
    with path.open(encoding="utf-8", newline="") as f:
        return [[row[c] for c in columns] for row in csv.DictReader(f)]


def _plot_command(args: argparse.Namespace) -> None:
    coords = _read_run_csv(args.out / COORDINATES, ("x", "y"))
    labels = _read_run_csv(args.out / ASSIGNMENTS, ("label",))
    output = args.output or args.out / f"scatter-{args.stage}.svg"
    path = emit_scatter_svg(
        [[float(x), float(y)] for x, y in coords],
        [int(label) for (label,) in labels],
        args.stage,
        output,
    )
    print(f"✅ Wrote `{path}`")


def _synth_command(args: argparse.Namespace) -> None:
    try:
        corpus = generate_planted_corpus(args.n_ideas, args.themes, seed=args.seed)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    write_jsonl(corpus.records, args.output)
    print(
        f"✅ Wrote {len(corpus.records)} ideas with themes"
        f" {', '.join(corpus.seed_words)} to `{args.output}`",
    )


_VERSIONED_PACKAGES = (
    "numpy",
    "scipy",
    "httpx",
    "tenacity",
    "ruamel.yaml",
    "rich",
    "rich_argparse",
    "tomli",
)


def _print_versions() -> None:
    """Print version information."""
    path = Path(__file__).parent
    txt = [
        f"ideatopic version: {__version__}",
        f"ideatopic location: {path}",
        f"Python version: {sys.version}",
        f"Python executable: {sys.executable}",
    ]
    for package in _VERSIONED_PACKAGES:
        version = get_package_version(package)
        if version is not None:
            txt.append(f"{package} version: {version}")
    if _rich_available():
        _print_with_rich(txt)
    else:
        print("\n".join(txt))


def _print_with_rich(data: list) -> None:
    """Print data as a table using rich, if it's installed."""
    from rich.console import Console
    from rich.table import Table

    console = Console()
    table = Table(show_header=False)
    table.add_column("Property", style="cyan")
    table.add_column("Value", style="magenta")
    for line in data:
        prop, value = line.split(":", 1)
        table.add_row(prop, value.strip())
    console.print(table)


_COMMANDS = {
    "run": _run_command,
    "sweep": _sweep_command,
    "plot": _plot_command,
    "synth": _synth_command,
}


def main(argv: Sequence[str] | None = None) -> None:
    """Main entry point for the command-line tool."""
    args = _parse_args(argv)
    if args.command == "version":
        _print_versions()
        return
    try:
        _COMMANDS[args.command](args)
    except ConfigError as e:
        print(e)
        sys.exit(EXIT_CONFIG)
    except StageError as e:
        print(f"❌ {e}")
        sys.exit(EXIT_STAGE)
    except OSError as e:
        print(f"❌ {e}" if not str(e).startswith("❌") else e)
        sys.exit(EXIT_IO)
    except ValueError as e:
        print(f"❌ {e}")
        sys.exit(EXIT_CONFIG)
