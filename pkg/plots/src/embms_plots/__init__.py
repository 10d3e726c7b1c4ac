"""Figure rendering for eMBMS link simulator sweep CSVs."""

from .errors import EmptyInputError, PlotError, SchemaError
from .figures import PlotSpec, render, staircase_points
from .schema import SweepData, read_sweep_csv

__all__ = [
    "EmptyInputError",
    "PlotError",
    "PlotSpec",
    "SchemaError",
    "SweepData",
    "read_sweep_csv",
    "render",
    "staircase_points",
]
