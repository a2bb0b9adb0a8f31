"""Link-level simulator for networks that pair an active relay with a
passive reconfigurable surface.

The library splits along the physics: geometry places nodes, channels turns
distances into deterministic link realizations, ris does the passive
beamforming math, relaying maps channels to achievable rates, pso searches
phase configurations the closed forms cannot reach, and experiments drives
deterministic sweeps with delimited output.
"""

from .channels import (
    ChannelModel,
    ChannelSet,
    ComplexCoefficient,
    LinkGain,
    LosMap,
    SystemParams,
    build_channel_set,
    db2lin,
    dbm2watt,
    free_space_gain,
    lin2db,
    link_gain,
    umi_gain,
    watt2dbm,
)
from .experiments import (
    METRIC_CHANNEL_GAIN,
    METRIC_GAIN_IMPROVEMENT,
    METRIC_RATE,
    SweepResult,
    SweepRow,
    SweepSpec,
    SweepValidationError,
    fig3_spec,
    fig4_spec,
    fig5_spec,
    fig6_spec,
    load_config,
    read_csv,
    run_custom,
    run_fig3,
    run_fig4,
    run_fig5,
    run_fig6,
    validate_spec,
    write_csv,
)
from .geometry import (
    NetworkLayout,
    Position,
    RisScenario,
    distance,
    relay_assisted_layout,
    ris_assisted_layout,
    symmetric_hrn_layout,
)
from .pso import NonFiniteFitnessError, PsoParams, PsoResult, optimize, phase_optimizer
from .relaying import (
    Duplex,
    Protocol,
    RateResult,
    SchemeSpec,
    Topology,
    evaluate_scheme,
    rate_fd_af,
    rate_fd_df,
    rate_hd_af,
    rate_hd_df,
)
from .ris import (
    RisPhaseVector,
    align_phases,
    cascaded_channel,
    coherent_cascade_bound,
    hybrid_hop_gain,
)

__version__ = "0.1.0"
