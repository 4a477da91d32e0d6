"""ideatopic - Topic mining for brainstorming transcripts.

This module provides a planted-theme corpus generator for demonstrations and
end-to-end checks.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from ideatopic._corpus import IdeaRecord

# The first word of each theme is its seed word and occurs in every idea.
THEMES: tuple[tuple[str, ...], ...] = (
    (
        "parking", "garage", "ticket", "meter", "permit", "lot",
        "valet", "curb", "spaces", "towing", "shuttle", "commute",
    ),
    (
        "garden", "compost", "seeds", "tomatoes", "watering", "soil",
        "greenhouse", "mulch", "harvest", "weeds", "orchard", "flowers",
    ),
    (
        "music", "guitar", "concert", "drummer", "melody", "rehearsal",
        "chorus", "playlist", "violin", "speakers", "festival", "album",
    ),
    (
        "budget", "invoice", "expenses", "savings", "payroll", "audit",
        "forecast", "spending", "receipts", "taxes", "ledger", "revenue",
    ),
    (
        "kitchen", "recipe", "oven", "spices", "baking", "dessert",
        "noodles", "cooking", "pantry", "lunch", "chef", "breakfast",
    ),
    (
        "travel", "airport", "luggage", "passport", "hotel", "itinerary",
        "flights", "tourism", "beaches", "cruise", "souvenirs", "visa",
    ),
)
FILLERS = ("the", "and", "we", "should", "more", "our", "for", "with")
SPEAKERS = ("Ana", "Ben", "Chen", "Dara", "Eli", "Femi")
GROUPS = ("red", "blue", "green")


class PlantedCorpus(NamedTuple):
    records: tuple[IdeaRecord, ...]
    themes: tuple[int, ...]
    vocabularies: tuple[tuple[str, ...], ...]

    @property
    def seed_words(self) -> list[str]:
        return [vocabulary[0] for vocabulary in self.vocabularies]


def generate_planted_corpus(
    n_ideas: int = 200,
    n_themes: int = 4,
    *,
    words_per_idea: int = 4,
    seed: int = 0,
) -> PlantedCorpus:
    """Generate ideas drawn from disjoint theme vocabularies.

    Idea `i` belongs to theme ``i % n_themes`` and contains the theme's seed
    word, `words_per_idea` other theme words and one or two filler stopwords.
    """
    if not 1 <= n_themes <= len(THEMES):
        msg = f"`n_themes` must be in [1, {len(THEMES)}], got {n_themes}."
        raise ValueError(msg)
    if not 1 <= words_per_idea < len(THEMES[0]):
        msg = f"`words_per_idea` must be in [1, {len(THEMES[0]) - 1}], got {words_per_idea}."
        raise ValueError(msg)
    if n_ideas < n_themes:
        msg = f"Need at least one idea per theme, got {n_ideas} for {n_themes} themes."
        raise ValueError(msg)
    rng = np.random.default_rng(seed)
    vocabularies = THEMES[:n_themes]
    records = []
    themes = []
    for i in range(n_ideas):
        theme = i % n_themes
        seed_word, *others = vocabularies[theme]
        picked_idx = rng.choice(len(others), words_per_idea, replace=False)
        picked = [others[j] for j in picked_idx]
        filler_idx = rng.choice(len(FILLERS), rng.integers(1, 3), replace=False)
        fillers = [FILLERS[j] for j in filler_idx]
        tokens = [seed_word, *picked, *fillers]
        order = rng.permutation(len(tokens))
        text = " ".join(tokens[j] for j in order).capitalize() + "."
        records.append(
            IdeaRecord(
                i,
                text,
                SPEAKERS[int(rng.integers(len(SPEAKERS)))],
                GROUPS[i % len(GROUPS)],
            ),
        )
        themes.append(theme)
    return PlantedCorpus(tuple(records), tuple(themes), vocabularies)


def write_jsonl(records: Sequence[IdeaRecord], path: str | Path) -> Path:
    """Write records in the JSONL input format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            row = {"text": record.text}
            if record.speaker is not None:
                row["speaker"] = record.speaker
            if record.group is not None:
                row["group"] = record.group
            f.write(json.dumps(row) + "\n")
    return path


def cluster_purity(labels: Sequence[int], themes: Sequence[int]) -> float:
    """Share of clustered points whose theme is the majority theme of their cluster."""
    by_label: dict[int, list[int]] = {}
    for label, theme in zip(labels, themes):
        if label >= 0:
            by_label.setdefault(label, []).append(theme)
    clustered = sum(len(ts) for ts in by_label.values())
    if clustered == 0:
        return 0.0
    majority = sum(max(ts.count(t) for t in set(ts)) for ts in by_label.values())
    return majority / clustered
