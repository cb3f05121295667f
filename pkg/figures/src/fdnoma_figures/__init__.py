"""Figure rendering for fdnoma CSV output."""

__version__ = "0.1.0"

from .render import FigureSpec, SchemaError, render_figure

__all__ = ["FigureSpec", "SchemaError", "render_figure", "__version__"]
