"""Figure rendering for simulator sweep CSVs."""

from .render import (
    AXIS_LABELS,
    EXPECTED_HEADER,
    VALUE_LABELS,
    FigureJob,
    RenderInfo,
    SchemaError,
    SweepRecord,
    load_rows,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "AXIS_LABELS",
    "EXPECTED_HEADER",
    "VALUE_LABELS",
    "FigureJob",
    "RenderInfo",
    "SchemaError",
    "SweepRecord",
    "load_rows",
    "render",
    "__version__",
]
