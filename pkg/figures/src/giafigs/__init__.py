"""Figure rendering over simulator trajectory CSVs.

The CSV format is the only coupling to the simulator: this package
never imports it. Each figure id maps to a fixed set of required
columns and a fixed layout; rendering is read-only over its inputs.
"""

from .render import (FIGURE_IDS, FigureInputError, FigureSpec,
                     MissingColumnError, build_figure, load_csv, render)

__all__ = [
    "FIGURE_IDS", "FigureInputError", "FigureSpec", "MissingColumnError",
    "build_figure", "load_csv", "render",
]
