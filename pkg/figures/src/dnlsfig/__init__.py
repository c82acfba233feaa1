"""Figure scripts for the damped-NLS solver.

This package consumes the solver's published file formats only — the
CSV time-series schema and the versioned snapshot container — and never
imports the solver itself, so it can render outputs produced on any
machine.
"""

from .figures import (
    KINDS,
    FigureSpec,
    plot_contour_grid,
    plot_surface,
    plot_timeseries,
    plot_widths,
    render,
)
from .formats import (
    FormatError,
    Snapshot,
    TimeSeries,
    parse_snapshot,
    parse_timeseries,
    read_snapshot,
    read_timeseries,
)

__all__ = [
    "KINDS",
    "FigureSpec",
    "FormatError",
    "Snapshot",
    "TimeSeries",
    "parse_snapshot",
    "parse_timeseries",
    "plot_contour_grid",
    "plot_surface",
    "plot_timeseries",
    "plot_widths",
    "read_snapshot",
    "read_timeseries",
    "render",
]

__version__ = "0.1.0"
