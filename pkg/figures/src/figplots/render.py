"""Render line plots and heatmaps from simulator CSV datasets.

Inputs are read-only and rendering is deterministic, so repeated renders of
the same CSV produce identical images (given fixed library versions).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # headless, deterministic backend
import matplotlib.pyplot as plt
import numpy as np

from .reader import Dataset, read_dataset

KINDS = ("line", "dual-line", "heatmap")

#: default curve colors follow the red/blue convention of the source plots
DEFAULT_COLORS = ("tab:red", "tab:blue", "tab:green", "tab:orange")


@dataclass(frozen=True)
class FigureRecipe:
    source: str | Path
    kind: str
    output: str | Path
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None
    colors: tuple[str, ...] = DEFAULT_COLORS
    dpi: int = 150

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


def heatmap_grid(data: Dataset) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reassemble a three-column (x, y, z) dataset into its 2-D grid.

    Rows are expected in row-major order with the first column outermost,
    exactly as the sweep commands write them.
    """
    if len(data.columns) != 3:
        raise ValueError(f"heatmap needs exactly 3 columns, file has {data.columns}")
    arr = np.asarray(data.rows)
    xs = np.unique(arr[:, 0])
    ys = np.unique(arr[:, 1])
    if len(xs) * len(ys) != len(arr):
        raise ValueError(
            f"rows do not form a rectangular grid: {len(xs)} x {len(ys)} != {len(arr)}"
        )
    z = np.full((len(xs), len(ys)), np.nan)
    x_index = {v: i for i, v in enumerate(xs)}
    y_index = {v: i for i, v in enumerate(ys)}
    for x, y, value in arr:
        z[x_index[x], y_index[y]] = value
    if np.any(np.isnan(z)):
        raise ValueError("grid has duplicate or missing (x, y) combinations")
    return xs, ys, z


def render(recipe: FigureRecipe) -> Path:
    """Render one figure; returns the written path.

    The output file is only created after the input parses cleanly.
    """
    data = read_dataset(recipe.source)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    try:
        if recipe.kind == "heatmap":
            _draw_heatmap(ax, fig, data, recipe)
        else:
            _draw_lines(ax, data, recipe)
        if recipe.title:
            ax.set_title(recipe.title)
        fig.tight_layout()
        out = Path(recipe.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, dpi=recipe.dpi)
    finally:
        plt.close(fig)
    return Path(recipe.output)


def _draw_lines(ax, data: Dataset, recipe: FigureRecipe) -> None:
    arr = np.asarray(data.rows)
    x = arr[:, 0]
    series = data.columns[1:]
    if recipe.kind == "dual-line" and len(series) != 2:
        raise ValueError(f"dual-line needs exactly 2 value columns, file has {series}")
    for k, name in enumerate(series):
        color = recipe.colors[k % len(recipe.colors)]
        ax.plot(x, arr[:, k + 1], color=color, label=name)
    ax.set_xlabel(recipe.xlabel or data.columns[0])
    ax.set_ylabel(recipe.ylabel or (series[0] if len(series) == 1 else ""))
    ax.grid(True, alpha=0.3)
    if len(series) > 1:
        ax.legend()
    if recipe.kind == "dual-line":
        ratio = arr[-1, 1] / arr[-1, 2]
        ax.annotate(
            f"endpoint ratio = {ratio:.6f}",
            xy=(x[-1], arr[-1, 1]),
            xytext=(0.55, 0.5),
            textcoords="axes fraction",
            fontsize=9,
        )


def _draw_heatmap(ax, fig, data: Dataset, recipe: FigureRecipe) -> None:
    xs, ys, z = heatmap_grid(data)
    mesh = ax.pcolormesh(xs, ys, z.T, shading="nearest", cmap="viridis")
    ax.set_xlabel(recipe.xlabel or data.columns[0])
    ax.set_ylabel(recipe.ylabel or data.columns[1])
    fig.colorbar(mesh, ax=ax, label=data.columns[2])
