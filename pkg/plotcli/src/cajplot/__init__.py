"""Deterministic figure rendering for sweep CSV files.

The simulator writes CSV rows; this package turns them into SVG figures
described by bundled specs.  It never simulates and never recomputes a
metric, so the two packages only meet at the CSV schema.
"""

from .records import HEADER, InputError, Row, read_rows, series_for_metric
from .render import LOG_FLOOR, render
from .specs import FigureSpec, SpecError, find_spec, load_specs

__all__ = [
    "HEADER",
    "InputError",
    "Row",
    "read_rows",
    "series_for_metric",
    "LOG_FLOOR",
    "render",
    "FigureSpec",
    "SpecError",
    "find_spec",
    "load_specs",
]
