"""Figure rendering for simulator CSV artifacts."""

__version__ = "0.1.0"

from .figures import FigureSpec, PlotError, read_table, render

__all__ = ["FigureSpec", "PlotError", "read_table", "render"]
