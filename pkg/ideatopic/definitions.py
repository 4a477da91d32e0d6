"""ideatopic - Topic mining for brainstorming transcripts.

Literal types shared across the pipeline stages.
"""

from __future__ import annotations

from typing import Literal, get_args

InputFormat = Literal["jsonl", "plaintext"]
ProviderKind = Literal["hash", "file", "http"]
Metric = Literal["cosine", "euclidean"]
InitKind = Literal["random", "spectral"]
CoherenceMetric = Literal["c_v", "c_npmi"]
PlotStage = Literal["unclustered", "clustered", "no-outliers"]

# Aliases accepted on the command line and in config files
FORMAT_ALIASES: dict[str, InputFormat] = {
    "jsonl": "jsonl",
    "json": "jsonl",
    "plaintext": "plaintext",
    "text": "plaintext",
    "txt": "plaintext",
}

OUTLIER = -1


def validate_choice(value: str, choices: type, name: str) -> str:
    """Check that `value` is one of the members of a `Literal` type."""
    valid = get_args(choices)
    if value not in valid:
        msg = f"Invalid {name} `{value}`, must be one of {', '.join(valid)}."
        raise ValueError(msg)
    return value


def normalize_format(value: str) -> InputFormat:
    """Map a user-provided format name (e.g. `text`) to an `InputFormat`."""
    try:
        return FORMAT_ALIASES[value.lower()]
    except KeyError:
        msg = f"Invalid input format `{value}`, must be one of jsonl, text."
        raise ValueError(msg) from None
