"""Figure regeneration for d2dsim sweep CSVs."""

from .reader import CsvFormatError, read_sweep_csv
from .render import FigureSpec, RenderResult, load_figure_specs, render, render_all

__all__ = ["CsvFormatError", "read_sweep_csv", "FigureSpec", "RenderResult",
           "load_figure_specs", "render", "render_all"]
