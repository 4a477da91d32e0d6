"""ideatopic - Topic mining for brainstorming transcripts.

This module renders deterministic SVG scatter plots of the 2-D layout.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from ideatopic.definitions import OUTLIER, PlotStage, validate_choice

WIDTH = 800
HEIGHT = 600
MARGIN = 0.05
RADIUS = 3
PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#843c39",
    "#bcbd22",
    "#17becf",
    "#393b79",
    "#637939",
)
OUTLIER_COLOR = "#a0a0a0"
TITLES = {
    "unclustered": "Ideas before clustering",
    "clustered": "Clustered ideas",
    "no-outliers": "Clustered ideas without outliers",
}


def _axis(values: np.ndarray, size: int) -> tuple[float, float]:
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo or 1.0
    lo -= MARGIN * span
    hi += MARGIN * span
    return lo, size / (hi - lo)


def color_for(label: int) -> str:
    return OUTLIER_COLOR if label == OUTLIER else PALETTE[label % len(PALETTE)]


def render_scatter_svg(
    coordinates: np.ndarray | Sequence[Sequence[float]],
    labels: Sequence[int],
    stage: PlotStage,
) -> str:
    """Return the SVG document for `stage` as a string."""
    validate_choice(stage, PlotStage, "plot stage")
    coords = np.asarray(coordinates, dtype=np.float64)
    if coords.size == 0:
        msg = "Cannot plot an empty coordinate set."
        raise ValueError(msg)
    if coords.ndim != 2 or coords.shape[1] != 2:  # noqa: PLR2004
        msg = f"Coordinates must have shape (n, 2), got {coords.shape}."
        raise ValueError(msg)
    if len(labels) != coords.shape[0]:
        msg = f"Got {len(labels)} labels for {coords.shape[0]} points."
        raise ValueError(msg)

    drop_outliers = stage == "no-outliers"
    keep = [
        i for i, label in enumerate(labels) if not (drop_outliers and label == OUTLIER)
    ]
    shown = coords[keep] if keep else coords
    x0, sx = _axis(shown[:, 0], WIDTH)
    y0, sy = _axis(shown[:, 1], HEIGHT)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}"'
        f' viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{TITLES[stage]}</title>",
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    for i in keep:
        x = (coords[i, 0] - x0) * sx
        y = HEIGHT - (coords[i, 1] - y0) * sy
        fill = PALETTE[0] if stage == "unclustered" else color_for(labels[i])
        lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{RADIUS}" fill="{fill}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_scatter_svg(
    coordinates: np.ndarray | Sequence[Sequence[float]],
    labels: Sequence[int],
    stage: PlotStage,
    path: str | Path,
) -> Path:
    """Write the scatter plot for `stage` to `path`.

    The `clustered` stage colours points by label (palette of 12, cycling)
    with outliers in gray, `no-outliers` drops label -1 and `unclustered`
    uses a single colour.
    """
    path = Path(path)
    path.write_text(render_scatter_svg(coordinates, labels, stage), encoding="utf-8")
    return path
