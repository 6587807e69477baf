"""Publication-style figures from simulator CSV datasets."""

__version__ = "0.1.0"

from .reader import Dataset, read_dataset
from .render import DEFAULT_COLORS, KINDS, FigureRecipe, heatmap_grid, render

__all__ = [
    "__version__",
    "Dataset",
    "read_dataset",
    "DEFAULT_COLORS",
    "KINDS",
    "FigureRecipe",
    "heatmap_grid",
    "render",
]
