"""ideatopic - Topic mining for brainstorming transcripts.

This module provides the topic-count sweep: repeated refinement to several
target counts, scored with both C_V and C_NPMI and averaged per count.
"""

from __future__ import annotations

import json
from typing import TYPE_CHECKING, Any, NamedTuple, Sequence

import numpy as np

from ideatopic._coherence import mean_score, score_topic_set
from ideatopic._pipeline import cluster_and_extract, output_lock, prepare, stage
from ideatopic._topics import refine_topics
from ideatopic.utils import warn

if TYPE_CHECKING:
    from pathlib import Path

    from ideatopic._config import PipelineConfig

SKIPPED = "skipped: insufficient clusters"
SWEEP_FILE = "sweep.json"


class SweepRun(NamedTuple):
    count: int
    run: int
    seed: int
    found_topics: int
    c_v: float | None
    c_npmi: float | None


class SweepRow(NamedTuple):
    count: int
    runs: tuple[SweepRun, ...]
    c_v: float | None
    c_npmi: float | None
    status: str


class SweepReport(NamedTuple):
    rows: tuple[SweepRow, ...]
    c_v: float | None
    c_npmi: float | None

    @property
    def stored_runs(self) -> list[SweepRun]:
        return [run for row in self.rows for run in row.runs]

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows": [
                {
                    "count": row.count,
                    "status": row.status,
                    "c_v": row.c_v,
                    "c_npmi": row.c_npmi,
                    "runs": [run._asdict() for run in row.runs],
                }
                for row in self.rows
            ],
            "mean": {"c_v": self.c_v, "c_npmi": self.c_npmi},
        }


def derive_seed(base_seed: int, run: int) -> int:
    """Seed for run `run`, derived from `base_seed` with `numpy.random.SeedSequence`."""
    sequence = np.random.SeedSequence([base_seed & (2**64 - 1), run])
    state = sequence.generate_state(1, np.uint64)
    return int(state[0])


def _row_status(completed: int, attempted: int) -> str:
    if completed == 0:
        return SKIPPED
    if completed < attempted:
        return f"partial: {completed} of {attempted} runs"
    return "ok"


def sweep_topics(
    cfg: PipelineConfig,
    counts: Sequence[int],
    runs_per_count: int = 3,
    *,
    verbose: bool = False,
) -> SweepReport:
    """Refine to every count in `counts`, `runs_per_count` times each.

    Run `r` reduces and clusters once with a seed derived from ``(cfg.seed, r)``
    and is then refined to each count and scored with C_V and C_NPMI. Counts
    above the number of clusters found are recorded as skipped. Averages are
    taken over the stored runs.
    """
    if not counts or any(c < 1 for c in counts):
        msg = f"`counts` must be a non-empty list of positive integers, got {list(counts)}."
        raise ValueError(msg)
    if runs_per_count < 1:
        msg = f"`runs_per_count` must be >= 1, got {runs_per_count}."
        raise ValueError(msg)
    prepared = prepare(cfg, verbose=verbose)
    metrics = {
        name: cfg.coherence._replace(metric=name) for name in ("c_v", "c_npmi")
    }
    per_count: dict[int, list[SweepRun]] = {c: [] for c in counts}
    for run in range(runs_per_count):
        seed = derive_seed(cfg.seed, run)
        clustering = cluster_and_extract(cfg, prepared, seed, verbose=verbose)
        found = len(clustering.topic_set.topics)
        for count in counts:
            if count > found:
                warn(f"⚠️  Run {run} found {found} topics, cannot refine to {count}.")
                continue
            with stage("refine"):
                refined = refine_topics(
                    clustering.topic_set,
                    count,
                    preserve_threshold=cfg.preserve_threshold,
                )
            with stage("coherence"):
                scores = {
                    name: score_topic_set(refined, prepared.reference, metric).overall
                    for name, metric in metrics.items()
                }
            per_count[count].append(
                SweepRun(count, run, seed, found, scores["c_v"], scores["c_npmi"]),
            )
            if verbose:
                print(
                    f"📊 count={count} run={run}: C_V={scores['c_v']}, C_NPMI={scores['c_npmi']}",
                )
    rows = tuple(
        SweepRow(
            count,
            tuple(runs),
            mean_score(r.c_v for r in runs),
            mean_score(r.c_npmi for r in runs),
            _row_status(len(runs), runs_per_count),
        )
        for count, runs in per_count.items()
    )
    stored = [run for row in rows for run in row.runs]
    return SweepReport(
        rows,
        mean_score(r.c_v for r in stored),
        mean_score(r.c_npmi for r in stored),
    )


def write_sweep(report: SweepReport, out_dir: Path) -> Path:
    """Write `sweep.json` to `out_dir` under the output lock."""
    with output_lock(out_dir):
        path = out_dir / SWEEP_FILE
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path
