"""Error types for the figure-rendering tool."""


class PlotError(Exception):
    """Base class for everything this package raises on bad input."""


class SchemaError(PlotError):
    """A CSV file does not match the sweep output schema."""


class EmptyInputError(PlotError):
    """A CSV parsed cleanly but holds no rows the figure kind can draw."""
