"""Turns sweep CSVs into figures.

The input contract is the eight-column schema the simulator emits:
metric,scheme,d_ab_m,d_ri_m,pt_dbm,m,value,seed. Loading is strict and
names the first offending line, because a silently mis-parsed sweep makes
a plausible-looking but wrong plot. Rendering draws on an Agg canvas
owned by this module, so no global backend state is touched.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from matplotlib.patches import Patch

EXPECTED_HEADER = ["metric", "scheme", "d_ab_m", "d_ri_m", "pt_dbm", "m", "value", "seed"]

VALUE_LABELS = {
    "channel_gain_db": "channel gain [dB]",
    "gain_improvement_db": "gain improvement [dB]",
    "rate_bps_hz": "achievable rate [bit/s/Hz]",
}

AXIS_LABELS = {
    "d_ab_m": "link distance [m]",
    "d_ri_m": "surface offset [m]",
    "pt_dbm": "transmit power [dBm]",
    "m": "surface elements",
}


class SchemaError(ValueError):
    """Input does not match the sweep CSV contract; points at one line."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


@dataclass(frozen=True)
class SweepRecord:
    metric: str
    scheme: str
    d_ab_m: float | None
    d_ri_m: float | None
    pt_dbm: float | None
    m: int | None
    value: float
    seed: int


@dataclass
class FigureJob:
    """One rendering task: which CSV, which layout, where to write."""

    input_csv: str | Path
    kind: str  # "surface" or "lines"
    output_path: str | Path
    dpi: int | None = None  # raster exports only; vector formats ignore it
    x_label: str | None = None
    y_label: str | None = None
    value_label: str | None = None


@dataclass
class RenderInfo:
    """What ended up in the figure, for callers that want to inspect it."""

    output_path: Path
    kind: str
    # surface kind: m -> grid of values over (d_ab sorted, d_ri sorted)
    surfaces: dict[int, np.ndarray] = field(default_factory=dict)
    d_ab_values: list[float] = field(default_factory=list)
    d_ri_values: list[float] = field(default_factory=list)
    # lines kind: scheme -> (x values, y values), plus which column was x
    series: dict[str, tuple[list[float], list[float]]] = field(default_factory=dict)
    x_axis: str = ""


def _parse_optional_float(text: str, line_number: int, column: str) -> float | None:
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise SchemaError(line_number, f"{column} must be a number or empty, got {text!r}")


def load_rows(path: str | Path) -> list[SweepRecord]:
    """Read and validate a sweep CSV; raises SchemaError on the first bad line."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EXPECTED_HEADER:
            raise SchemaError(1, f"header {header!r} does not match {EXPECTED_HEADER!r}")
        records = []
        for line_number, row in enumerate(reader, start=2):
            if len(row) != len(EXPECTED_HEADER):
                raise SchemaError(
                    line_number, f"expected {len(EXPECTED_HEADER)} fields, got {len(row)}"
                )
            metric, scheme = row[0], row[1]
            if not metric or not scheme:
                raise SchemaError(line_number, "metric and scheme must be non-empty")
            try:
                value = float(row[6])
            except ValueError:
                raise SchemaError(line_number, f"value must be a number, got {row[6]!r}")
            if not np.isfinite(value):
                raise SchemaError(line_number, f"value must be finite, got {row[6]!r}")
            try:
                m = int(row[5]) if row[5] else None
                seed = int(row[7])
            except ValueError:
                raise SchemaError(line_number, f"m and seed must be integers, got {row[5]!r}, {row[7]!r}")
            records.append(SweepRecord(
                metric=metric,
                scheme=scheme,
                d_ab_m=_parse_optional_float(row[2], line_number, "d_ab_m"),
                d_ri_m=_parse_optional_float(row[3], line_number, "d_ri_m"),
                pt_dbm=_parse_optional_float(row[4], line_number, "pt_dbm"),
                m=m,
                value=value,
                seed=seed,
            ))
    if not records:
        raise SchemaError(2, "no data rows")
    return records


def _value_label(records: list[SweepRecord], override: str | None) -> str:
    if override:
        return override
    metrics = {record.metric for record in records}
    if len(metrics) == 1:
        return VALUE_LABELS.get(next(iter(metrics)), next(iter(metrics)))
    return "value"


def _pivot_surfaces(records: list[SweepRecord]) -> tuple[dict[int, np.ndarray], list[float], list[float]]:
    for record in records:
        if record.d_ab_m is None or record.d_ri_m is None or record.m is None:
            raise ValueError("surface figures need d_ab_m, d_ri_m, and m on every row")
    d_ab_values = sorted({record.d_ab_m for record in records})
    d_ri_values = sorted({record.d_ri_m for record in records})
    surfaces = {}
    for m in sorted({record.m for record in records}):
        cells = {
            (record.d_ab_m, record.d_ri_m): record.value
            for record in records
            if record.m == m
        }
        grid = np.empty((len(d_ri_values), len(d_ab_values)))
        for i, d_ri in enumerate(d_ri_values):
            for j, d_ab in enumerate(d_ab_values):
                if (d_ab, d_ri) not in cells:
                    raise ValueError(
                        f"surface grid incomplete: no row for m={m}, d_ab_m={d_ab}, d_ri_m={d_ri}"
                    )
                grid[i, j] = cells[(d_ab, d_ri)]
        surfaces[m] = grid
    return surfaces, d_ab_values, d_ri_values


def _render_surface(job: FigureJob, records: list[SweepRecord], fig: Figure) -> RenderInfo:
    surfaces, d_ab_values, d_ri_values = _pivot_surfaces(records)
    ax = fig.add_subplot(projection="3d")
    xs, ys = np.meshgrid(np.asarray(d_ab_values), np.asarray(d_ri_values))
    colors = ["tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple"]
    handles, labels = [], []
    for index, (m, grid) in enumerate(sorted(surfaces.items())):
        color = colors[index % len(colors)]
        ax.plot_surface(xs, ys, grid, color=color, alpha=0.8, linewidth=0)
        # plot_surface artists carry no legend entry; stand in with a patch
        handles.append(Patch(color=color))
        labels.append(f"M = {m}")
    ax.set_xlabel(job.x_label or AXIS_LABELS["d_ab_m"])
    ax.set_ylabel(job.y_label or AXIS_LABELS["d_ri_m"])
    ax.set_zlabel(_value_label(records, job.value_label))
    ax.legend(handles, labels, loc="upper right")
    return RenderInfo(
        output_path=Path(job.output_path),
        kind="surface",
        surfaces=surfaces,
        d_ab_values=d_ab_values,
        d_ri_values=d_ri_values,
    )


def _pick_line_axis(records: list[SweepRecord]) -> str:
    varying = [
        name for name in ("pt_dbm", "m")
        if len({getattr(record, name) for record in records}) > 1
    ]
    if len(varying) != 1:
        raise ValueError(
            "line figures need exactly one varying axis out of pt_dbm and m, "
            f"found {varying or 'none'}"
        )
    if any(getattr(record, varying[0]) is None for record in records):
        raise ValueError(f"line figures need {varying[0]} on every row")
    return varying[0]


def _render_lines(job: FigureJob, records: list[SweepRecord], fig: Figure) -> RenderInfo:
    x_axis = _pick_line_axis(records)
    ax = fig.add_subplot()
    series = {}
    schemes = sorted({record.scheme for record in records})
    for scheme in schemes:
        points = sorted(
            (
                (float(getattr(record, x_axis)), record.value)
                for record in records
                if record.scheme == scheme
            ),
        )
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        series[scheme] = (xs, ys)
        ax.plot(xs, ys, marker="o", markersize=3.5, label=scheme)
    if x_axis == "m":
        ax.set_xscale("log", base=2)  # the size presets double per step
    ax.set_xlabel(job.x_label or AXIS_LABELS[x_axis])
    ax.set_ylabel(job.y_label or _value_label(records, job.value_label))
    ax.grid(True, alpha=0.3)
    ax.legend()
    return RenderInfo(
        output_path=Path(job.output_path),
        kind="lines",
        series=series,
        x_axis=x_axis,
    )


def render(job: FigureJob) -> RenderInfo:
    """Render one job; the output file appears only on success."""
    if job.kind not in ("surface", "lines"):
        raise ValueError(f"unknown figure kind {job.kind!r}; expected 'surface' or 'lines'")
    records = load_rows(job.input_csv)
    fig = Figure(figsize=(8.0, 6.0))
    FigureCanvasAgg(fig)
    if job.kind == "surface":
        info = _render_surface(job, records, fig)
    else:
        info = _render_lines(job, records, fig)
    fig.savefig(job.output_path, dpi=job.dpi if job.dpi else "figure")
    return info
