"""Deterministic parameter sweeps and their delimited output.

A sweep is a cartesian grid over geometry, transmit power, surface size and
scheme. Every grid point derives its own seed from the master seed and its
position in the enumeration, so results never depend on worker count or
evaluation order. Channel seeds hang off the geometry/size axes only, which
keeps one channel realization fixed while power sweeps across it.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from itertools import product
from pathlib import Path

import numpy as np
import yaml

from .channels import (
    ChannelModel,
    LosMap,
    SystemParams,
    build_channel_set,
    db2lin,
    dbm2watt,
    lin2db,
    link_gain,
)
from .geometry import (
    Position,
    distance,
    relay_assisted_layout,
    ris_assisted_layout,
    symmetric_hrn_layout,
)
from .pso import PsoParams, phase_optimizer
from .relaying import SchemeSpec, Topology, evaluate_scheme
from .ris import hybrid_hop_gain

METRIC_CHANNEL_GAIN = "channel_gain_db"
METRIC_GAIN_IMPROVEMENT = "gain_improvement_db"
METRIC_RATE = "rate_bps_hz"
_METRICS = (METRIC_CHANNEL_GAIN, METRIC_GAIN_IMPROVEMENT, METRIC_RATE)

# hybrid-network rows in the gain sweeps are not tied to a relay protocol
GAIN_SCHEME_CODE = "hybrid"

# reference placement of the surface-only baseline in the improvement sweep
FIG4_BASELINE_RIS_OFFSET_M = 10.0

DEFAULT_SEED = 1

CSV_COLUMNS = ("metric", "scheme", "d_ab_m", "d_ri_m", "pt_dbm", "m", "value", "seed")

# seed-derivation tags: channels depend only on the geometry/size axes,
# swarm seeds on the full task index
_TAG_CHANNEL = 0
_TAG_SWARM = 1


class SweepValidationError(ValueError):
    """Invalid sweep description; problems lists every offending field."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid sweep: " + "; ".join(self.problems))


@dataclass
class SweepSpec:
    """Everything a sweep needs, in wire-format-friendly units."""

    metric: str
    d_ab_m: list[float]
    d_ri_m: list[float]
    pt_dbm: list[float]
    m_values: list[int]
    schemes: list[SchemeSpec] = field(default_factory=list)
    channel_model: ChannelModel = ChannelModel.FREE_SPACE
    los: LosMap = field(default_factory=LosMap)
    noise_dbm: float = -94.0
    si_over_noise_db: float = 0.0
    gain_alice_dbi: float = 0.0
    gain_bob_dbi: float = 0.0
    gain_relay_dbi: float = 5.0
    gain_ris_dbi: float = 5.0
    carrier_frequency: float = 3.0e9
    pso: PsoParams = field(default_factory=PsoParams)
    master_seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class SweepRow:
    """One output record; absent coordinates stay None (empty in CSV)."""

    metric: str
    scheme: str
    d_ab_m: float | None
    d_ri_m: float | None
    pt_dbm: float | None
    m: int | None
    value: float
    seed: int


@dataclass
class SweepResult:
    rows: list[SweepRow]

    def rows_where(self, **criteria) -> list[SweepRow]:
        """Rows whose attributes equal every given criterion."""
        return [
            row for row in self.rows
            if all(getattr(row, name) == want for name, want in criteria.items())
        ]

    def value(self, **criteria) -> float:
        """The single matching row's value; raises unless exactly one matches."""
        rows = self.rows_where(**criteria)
        if len(rows) != 1:
            raise LookupError(f"expected one row for {criteria}, found {len(rows)}")
        return rows[0].value


def validate_spec(spec: SweepSpec) -> None:
    problems = []
    if spec.metric not in _METRICS:
        problems.append(f"metric: unknown {spec.metric!r}")
    for name, grid in (("d_ab_m", spec.d_ab_m), ("d_ri_m", spec.d_ri_m)):
        if not grid:
            problems.append(f"{name}: empty grid")
        elif any(not d > 0.0 for d in grid):
            problems.append(f"{name}: distances must be positive")
    if not spec.m_values:
        problems.append("m_values: empty grid")
    elif any(m < 0 for m in spec.m_values):
        problems.append("m_values: element counts must be non-negative")
    if spec.metric == METRIC_RATE:
        if not spec.pt_dbm:
            problems.append("pt_dbm: empty grid")
        if not spec.schemes:
            problems.append("schemes: empty list")
    if not dbm2watt(spec.noise_dbm) > 0.0:
        problems.append("noise_dbm: must convert to positive power")
    if spec.carrier_frequency <= 0.0:
        problems.append("carrier_frequency: must be positive")
    if spec.master_seed < 0:
        problems.append("master_seed: must be non-negative")
    try:
        spec.pso.validate()
    except ValueError as err:
        problems.append(f"pso: {err}")
    if problems:
        raise SweepValidationError(problems)


def _derive_seed(master: int, tag: int, index: int) -> int:
    return int(np.random.SeedSequence([master, tag, index]).generate_state(1)[0])


def _point_params(spec: SweepSpec, pt_dbm: float | None, seed: int) -> SystemParams:
    noise = dbm2watt(spec.noise_dbm)
    return SystemParams(
        total_tx_power=1.0 if pt_dbm is None else dbm2watt(pt_dbm),
        carrier_frequency=spec.carrier_frequency,
        noise_power=noise,
        residual_si_power=noise * db2lin(spec.si_over_noise_db),
        gain_alice_dbi=spec.gain_alice_dbi,
        gain_bob_dbi=spec.gain_bob_dbi,
        gain_relay_dbi=spec.gain_relay_dbi,
        gain_ris_dbi=spec.gain_ris_dbi,
        rng_seed=seed,
    )


def _layout_for(scheme: SchemeSpec, d_ab: float, d_ri: float):
    if scheme.topology is Topology.HYBRID:
        return symmetric_hrn_layout(d_ab, d_ri)
    if scheme.topology is Topology.RELAY_ONLY:
        return relay_assisted_layout(d_ab)
    return ris_assisted_layout(d_ab, scheme.ris_scenario, d_ri)


@dataclass(frozen=True)
class _RateTask:
    scheme_index: int
    d_ab: float
    d_ri: float
    pt: float
    m: int
    channel_seed: int
    swarm_seed: int


@dataclass(frozen=True)
class _GainTask:
    d_ab: float
    d_ri: float
    m: int
    seed: int


def _eval_rate_point(spec: SweepSpec, task: _RateTask) -> SweepRow:
    scheme = spec.schemes[task.scheme_index]
    params = _point_params(spec, task.pt, task.channel_seed)
    layout = _layout_for(scheme, task.d_ab, task.d_ri)
    channels = build_channel_set(layout, spec.channel_model, task.m, params, spec.los)
    optimizer = phase_optimizer(replace(spec.pso, seed=task.swarm_seed))
    result = evaluate_scheme(scheme, layout, channels, params, optimizer)
    return SweepRow(
        spec.metric, scheme.code, task.d_ab, task.d_ri, task.pt, task.m,
        round(result.rate, 4), task.channel_seed,
    )


def _hop_gain_parts(spec: SweepSpec, d_ab: float, d_ri: float) -> tuple[float, float, float]:
    layout = symmetric_hrn_layout(d_ab, d_ri)
    fc = spec.carrier_frequency
    beta_dir = link_gain(
        spec.channel_model, distance(layout.alice, layout.relay),
        spec.los.alice_relay, spec.gain_alice_dbi, spec.gain_relay_dbi, fc,
    ).value
    beta_in = link_gain(
        spec.channel_model, distance(layout.alice, layout.ris),
        spec.los.alice_ris, spec.gain_alice_dbi, spec.gain_ris_dbi, fc,
    ).value
    beta_out = link_gain(
        spec.channel_model, distance(layout.ris, layout.relay),
        spec.los.ris_relay, spec.gain_ris_dbi, spec.gain_relay_dbi, fc,
    ).value
    return beta_dir, beta_in, beta_out


def _eval_gain_point(spec: SweepSpec, task: _GainTask) -> SweepRow:
    beta_dir, beta_in, beta_out = _hop_gain_parts(spec, task.d_ab, task.d_ri)
    value = lin2db(hybrid_hop_gain(beta_dir, beta_in, beta_out, task.m))
    return SweepRow(
        spec.metric, GAIN_SCHEME_CODE, task.d_ab, task.d_ri, None, task.m,
        round(value, 4), task.seed,
    )


def _baseline_gain(spec: SweepSpec, d_ab: float, m: int) -> float:
    """Best single-technology hop gain: surface near the source vs midpoint relay."""
    fc = spec.carrier_frequency
    ris_pos = Position(0.0, FIG4_BASELINE_RIS_OFFSET_M)
    alice = Position(0.0, 0.0)
    bob = Position(d_ab, 0.0)
    beta_in = link_gain(
        spec.channel_model, distance(alice, ris_pos),
        spec.los.alice_ris, spec.gain_alice_dbi, spec.gain_ris_dbi, fc,
    ).value
    beta_out = link_gain(
        spec.channel_model, distance(ris_pos, bob),
        spec.los.ris_bob, spec.gain_ris_dbi, spec.gain_bob_dbi, fc,
    ).value
    surface_gain = m * m * beta_in * beta_out
    relay_gain = link_gain(
        spec.channel_model, d_ab / 2.0,
        spec.los.alice_relay, spec.gain_alice_dbi, spec.gain_relay_dbi, fc,
    ).value
    return max(surface_gain, relay_gain)


def _eval_improvement_point(spec: SweepSpec, task: _GainTask) -> SweepRow:
    beta_dir, beta_in, beta_out = _hop_gain_parts(spec, task.d_ab, task.d_ri)
    beta_h = hybrid_hop_gain(beta_dir, beta_in, beta_out, task.m)
    value = lin2db(beta_h / _baseline_gain(spec, task.d_ab, task.m))
    return SweepRow(
        spec.metric, GAIN_SCHEME_CODE, task.d_ab, task.d_ri, None, task.m,
        round(value, 4), task.seed,
    )


def _run_tasks(worker, tasks, jobs: int) -> list[SweepRow]:
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    chunk = max(1, len(tasks) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks, chunksize=chunk))


def run_custom(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Run the full cartesian sweep described by spec."""
    validate_spec(spec)
    geometry_axes = list(product(spec.d_ab_m, spec.d_ri_m, spec.m_values))

    if spec.metric == METRIC_RATE:
        tasks = []
        task_index = 0
        for geo_index, (d_ab, d_ri, m) in enumerate(geometry_axes):
            channel_seed = _derive_seed(spec.master_seed, _TAG_CHANNEL, geo_index)
            for pt in spec.pt_dbm:
                for scheme_index in range(len(spec.schemes)):
                    tasks.append(_RateTask(
                        scheme_index, d_ab, d_ri, pt, m,
                        channel_seed,
                        _derive_seed(spec.master_seed, _TAG_SWARM, task_index),
                    ))
                    task_index += 1
        worker = partial(_eval_rate_point, spec)
    else:
        tasks = [
            _GainTask(d_ab, d_ri, m, _derive_seed(spec.master_seed, _TAG_CHANNEL, i))
            for i, (d_ab, d_ri, m) in enumerate(geometry_axes)
        ]
        if spec.metric == METRIC_CHANNEL_GAIN:
            worker = partial(_eval_gain_point, spec)
        else:
            worker = partial(_eval_improvement_point, spec)

    return SweepResult(_run_tasks(worker, tasks, jobs))


# ---------------------------------------------------------------------------
# bundled study presets

def fig3_spec(seed: int = DEFAULT_SEED) -> SweepSpec:
    """Hop-gain surfaces over the placement grid, small and large surface."""
    return SweepSpec(
        metric=METRIC_CHANNEL_GAIN,
        d_ab_m=[float(d) for d in range(100, 1001, 100)],
        d_ri_m=[float(d) for d in range(2, 51, 2)],
        pt_dbm=[],
        m_values=[64, 400],
        channel_model=ChannelModel.FREE_SPACE,
        master_seed=seed,
    )


def fig4_spec(seed: int = DEFAULT_SEED) -> SweepSpec:
    """Hybrid hop gain relative to the best single-technology deployment."""
    spec = fig3_spec(seed)
    spec.metric = METRIC_GAIN_IMPROVEMENT
    return spec


_DF_SCHEMES = (
    "hybrid-hd-df", "hybrid-fd-df", "relay-hd-df", "relay-fd-df",
    "ris-near-alice", "ris-midpoint",
)
_AF_SCHEMES = (
    "hybrid-hd-af", "hybrid-fd-af", "relay-hd-af", "relay-fd-af",
    "ris-near-alice", "ris-midpoint",
)


def fig5_spec(seed: int = DEFAULT_SEED) -> SweepSpec:
    """Rate vs transmit power, decode-and-forward family.

    Fixed street-canyon geometry (300 m hop, 15 m lateral offsets), 64
    cells, residual self-interference at the noise floor. The grid tops out
    at 40 dBm so the high-power rank flip between the half-duplex hybrid
    and the near-source surface falls inside the sweep.
    """
    return SweepSpec(
        metric=METRIC_RATE,
        d_ab_m=[300.0],
        d_ri_m=[15.0],
        pt_dbm=[float(p) for p in range(0, 41, 2)],
        m_values=[64],
        schemes=[SchemeSpec.from_code(code) for code in _DF_SCHEMES],
        channel_model=ChannelModel.UMI,
        si_over_noise_db=0.0,
        master_seed=seed,
    )


def fig6_spec(seed: int = DEFAULT_SEED) -> SweepSpec:
    """Rate vs surface size, amplify-and-forward family.

    Same geometry as the power sweep, 20 dBm budget, residual
    self-interference 5 dB above the noise floor, surface size doubling
    from 16 to 1024 cells.
    """
    return SweepSpec(
        metric=METRIC_RATE,
        d_ab_m=[300.0],
        d_ri_m=[15.0],
        pt_dbm=[20.0],
        m_values=[16, 32, 64, 128, 256, 512, 1024],
        schemes=[SchemeSpec.from_code(code) for code in _AF_SCHEMES],
        channel_model=ChannelModel.UMI,
        si_over_noise_db=5.0,
        master_seed=seed,
    )


def _run_preset(spec: SweepSpec, jobs: int, pso_params: PsoParams | None) -> SweepResult:
    if pso_params is not None:
        spec.pso = pso_params
    return run_custom(spec, jobs=jobs)


def run_fig3(seed: int = DEFAULT_SEED, jobs: int = 1, pso_params: PsoParams | None = None) -> SweepResult:
    return _run_preset(fig3_spec(seed), jobs, pso_params)


def run_fig4(seed: int = DEFAULT_SEED, jobs: int = 1, pso_params: PsoParams | None = None) -> SweepResult:
    return _run_preset(fig4_spec(seed), jobs, pso_params)


def run_fig5(seed: int = DEFAULT_SEED, jobs: int = 1, pso_params: PsoParams | None = None) -> SweepResult:
    return _run_preset(fig5_spec(seed), jobs, pso_params)


def run_fig6(seed: int = DEFAULT_SEED, jobs: int = 1, pso_params: PsoParams | None = None) -> SweepResult:
    return _run_preset(fig6_spec(seed), jobs, pso_params)


# ---------------------------------------------------------------------------
# delimited output

def write_csv(result: SweepResult, path) -> None:
    """Emit rows under the fixed eight-column header, values to 4 decimals."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            writer.writerow([
                row.metric,
                row.scheme,
                _format_coord(row.d_ab_m),
                _format_coord(row.d_ri_m),
                _format_coord(row.pt_dbm),
                "" if row.m is None else str(row.m),
                f"{row.value:.4f}",
                str(row.seed),
            ])


def _format_coord(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def read_csv(path) -> SweepResult:
    """Parse a file produced by write_csv; header must match exactly."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(CSV_COLUMNS):
            raise ValueError(f"unexpected header {header!r}, want {list(CSV_COLUMNS)}")
        rows = []
        for record in reader:
            if len(record) != len(CSV_COLUMNS):
                raise ValueError(f"row has {len(record)} fields, want {len(CSV_COLUMNS)}: {record!r}")
            rows.append(SweepRow(
                metric=record[0],
                scheme=record[1],
                d_ab_m=_parse_coord(record[2]),
                d_ri_m=_parse_coord(record[3]),
                pt_dbm=_parse_coord(record[4]),
                m=int(record[5]) if record[5] else None,
                value=float(record[6]),
                seed=int(record[7]),
            ))
    return SweepResult(rows)


def _parse_coord(text: str) -> float | None:
    return float(text) if text else None


# ---------------------------------------------------------------------------
# sweep config files

_PRESET_SPECS = {
    "fig3": fig3_spec,
    "fig4": fig4_spec,
    "fig5": fig5_spec,
    "fig6": fig6_spec,
}

_CONFIG_KEYS = {
    "figure", "metric", "d_ab_m", "d_ri_m", "pt_dbm", "m", "schemes",
    "channel_model", "los", "noise_dbm", "si_over_noise_db",
    "gain_alice_dbi", "gain_bob_dbi", "gain_relay_dbi", "gain_ris_dbi",
    "carrier_frequency_hz", "seed", "pso",
}
_PSO_KEYS = {"particles", "iterations", "velocity_clamp"}
_LOS_KEYS = {"alice_relay", "relay_bob", "alice_ris", "ris_relay", "ris_bob"}


def load_config(path) -> SweepSpec:
    """Read a sweep description from a YAML key/value tree.

    A 'figure' key starts from that preset and overrides fields on top;
    otherwise the file must spell out metric and grids itself. All problems
    are reported together, each naming its field.
    """
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise SweepValidationError(["config: top level must be a mapping"])

    problems = [f"unknown key {key!r}" for key in sorted(set(raw) - _CONFIG_KEYS)]

    figure = raw.get("figure", "custom")
    if figure in _PRESET_SPECS:
        spec = _PRESET_SPECS[figure]()
    elif figure == "custom":
        spec = SweepSpec(
            metric=METRIC_RATE, d_ab_m=[], d_ri_m=[], pt_dbm=[], m_values=[],
        )
    else:
        raise SweepValidationError(
            problems + [f"figure: unknown preset {figure!r}"]
        )

    def take_number_list(key, attr, cast=float):
        if key not in raw:
            return
        value = raw[key]
        if not isinstance(value, list) or not all(isinstance(v, (int, float)) for v in value):
            problems.append(f"{key}: must be a list of numbers")
            return
        setattr(spec, attr, [cast(v) for v in value])

    def take_number(key, attr):
        if key not in raw:
            return
        value = raw[key]
        if not isinstance(value, (int, float)):
            problems.append(f"{key}: must be a number")
            return
        setattr(spec, attr, float(value))

    if "metric" in raw:
        spec.metric = str(raw["metric"])
    take_number_list("d_ab_m", "d_ab_m")
    take_number_list("d_ri_m", "d_ri_m")
    take_number_list("pt_dbm", "pt_dbm")
    take_number_list("m", "m_values", cast=int)
    if "schemes" in raw:
        if not isinstance(raw["schemes"], list):
            problems.append("schemes: must be a list of scheme codes")
        else:
            schemes = []
            for code in raw["schemes"]:
                try:
                    schemes.append(SchemeSpec.from_code(str(code)))
                except ValueError:
                    problems.append(f"schemes: unknown code {code!r}")
            spec.schemes = schemes
    if "channel_model" in raw:
        try:
            spec.channel_model = ChannelModel(str(raw["channel_model"]))
        except ValueError:
            problems.append(f"channel_model: unknown model {raw['channel_model']!r}")
    if "los" in raw:
        entry = raw["los"]
        if not isinstance(entry, dict):
            problems.append("los: must be a mapping of link to los/nlos")
        else:
            flags = {}
            for key, state in entry.items():
                if key not in _LOS_KEYS:
                    problems.append(f"los.{key}: unknown link")
                elif state not in ("los", "nlos"):
                    problems.append(f"los.{key}: must be 'los' or 'nlos'")
                else:
                    flags[key] = state == "los"
            spec.los = replace(spec.los, **flags)
    take_number("noise_dbm", "noise_dbm")
    take_number("si_over_noise_db", "si_over_noise_db")
    take_number("gain_alice_dbi", "gain_alice_dbi")
    take_number("gain_bob_dbi", "gain_bob_dbi")
    take_number("gain_relay_dbi", "gain_relay_dbi")
    take_number("gain_ris_dbi", "gain_ris_dbi")
    take_number("carrier_frequency_hz", "carrier_frequency")
    if "seed" in raw:
        if not isinstance(raw["seed"], int):
            problems.append("seed: must be an integer")
        else:
            spec.master_seed = raw["seed"]
    if "pso" in raw:
        entry = raw["pso"]
        if not isinstance(entry, dict):
            problems.append("pso: must be a mapping")
        else:
            problems.extend(
                f"pso.{key}: unknown key" for key in sorted(set(entry) - _PSO_KEYS)
            )
            updates = {}
            for key, attr in (
                ("particles", "particle_count"),
                ("iterations", "iteration_count"),
                ("velocity_clamp", "velocity_clamp"),
            ):
                if key in entry:
                    if not isinstance(entry[key], (int, float)):
                        problems.append(f"pso.{key}: must be a number")
                    else:
                        cast = int if key != "velocity_clamp" else float
                        updates[attr] = cast(entry[key])
            spec.pso = replace(spec.pso, **updates)

    if problems:
        raise SweepValidationError(problems)
    validate_spec(spec)
    return spec
