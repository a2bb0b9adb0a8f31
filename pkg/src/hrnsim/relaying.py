"""Achievable-rate models for the relay, surface-only, and hybrid schemes.

Power policy: half-duplex schemes give the single active transmitter the
full budget P_T in its slot; full-duplex schemes run source and relay
simultaneously at P_T/2 each. The surface is passive either way. A
full-duplex relay keeps a residual self-interference floor after
cancellation, taken as a fixed power level rather than re-derived from the
loop channel. Full-duplex destinations additionally hear the source leak
through the surface, which the phase configuration can only partly avoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .channels import ChannelSet, SystemParams
from .geometry import NetworkLayout, RisScenario
from .ris import RisPhaseVector, align_phases, cascaded_channel

PhaseOptimizer = Callable[[Callable[[np.ndarray], float], int, Sequence[np.ndarray]], RisPhaseVector]


class Topology(Enum):
    HYBRID = "hybrid"
    RELAY_ONLY = "relay"
    RIS_ONLY = "ris"


class Duplex(Enum):
    HALF = "hd"
    FULL = "fd"


class Protocol(Enum):
    DECODE_FORWARD = "df"
    AMPLIFY_FORWARD = "af"


_RIS_SCENARIO_CODES = {
    RisScenario.NEAR_ALICE: "ris-near-alice",
    RisScenario.MIDPOINT: "ris-midpoint",
}


@dataclass(frozen=True)
class SchemeSpec:
    """One evaluable scheme: which nodes exist and how the relay runs.

    Relay-bearing topologies need duplex and protocol; the surface-only
    topology needs a placement scenario instead.
    """

    topology: Topology
    duplex: Duplex | None = None
    protocol: Protocol | None = None
    ris_scenario: RisScenario | None = None

    def __post_init__(self):
        if self.topology is Topology.RIS_ONLY:
            if self.ris_scenario is None:
                raise ValueError("surface-only scheme needs a placement scenario")
            if self.duplex is not None or self.protocol is not None:
                raise ValueError("surface-only scheme takes no duplex or protocol")
        else:
            if self.duplex is None or self.protocol is None:
                raise ValueError(f"{self.topology.value} scheme needs duplex and protocol")
            if self.ris_scenario is not None:
                raise ValueError("placement scenario only applies to surface-only schemes")

    @property
    def code(self) -> str:
        """Short wire form, e.g. 'hybrid-fd-df' or 'ris-near-alice'."""
        if self.topology is Topology.RIS_ONLY:
            return _RIS_SCENARIO_CODES[self.ris_scenario]
        return f"{self.topology.value}-{self.duplex.value}-{self.protocol.value}"

    @classmethod
    def from_code(cls, code: str) -> "SchemeSpec":
        for scenario, scen_code in _RIS_SCENARIO_CODES.items():
            if code == scen_code:
                return cls(Topology.RIS_ONLY, ris_scenario=scenario)
        parts = code.split("-")
        if len(parts) == 3:
            topo, dup, proto = parts
            try:
                return cls(Topology(topo), Duplex(dup), Protocol(proto))
            except ValueError:
                pass
        known = sorted(
            [f"{t.value}-{d.value}-{p.value}" for t in (Topology.HYBRID, Topology.RELAY_ONLY)
             for d in Duplex for p in Protocol]
            + list(_RIS_SCENARIO_CODES.values())
        )
        raise ValueError(f"unknown scheme code {code!r}; expected one of {known}")


@dataclass(frozen=True)
class RateResult:
    """Rate in bit/s/Hz plus the SINRs and phases behind it.

    sinr_hop1 is the relay-input (or single-link) SINR, sinr_hop2 the
    destination-side SINR; for amplify-and-forward full duplex the latter is
    the end-to-end SINR after noise amplification. Surface-only schemes have
    one link and report it in both slots.
    """

    rate: float
    sinr_hop1: float
    sinr_hop2: float
    phase_config: tuple[RisPhaseVector, ...] = ()


def _check_nonnegative(**values: float) -> None:
    bad = [name for name, v in values.items() if v < 0.0]
    if bad:
        raise ValueError(f"negative inputs not allowed: {', '.join(bad)}")


def rate_hd_df(snr_hop1: float, snr_hop2: float) -> float:
    """Two-slot decode-and-forward; the weaker hop decides."""
    _check_nonnegative(snr_hop1=snr_hop1, snr_hop2=snr_hop2)
    return 0.5 * math.log2(1.0 + min(snr_hop1, snr_hop2))


def rate_hd_af(snr_hop1: float, snr_hop2: float) -> float:
    """Two-slot amplify-and-forward with the cascaded two-hop SNR."""
    _check_nonnegative(snr_hop1=snr_hop1, snr_hop2=snr_hop2)
    cascade = snr_hop1 * snr_hop2 / (snr_hop1 + snr_hop2 + 1.0)
    return 0.5 * math.log2(1.0 + cascade)


def rate_fd_df(sinr_relay: float, sinr_bob: float) -> float:
    """Full-duplex decode-and-forward, no slot halving."""
    _check_nonnegative(sinr_relay=sinr_relay, sinr_bob=sinr_bob)
    return math.log2(1.0 + min(sinr_relay, sinr_bob))


def _fd_af_sinr(
    gain_hop1: float,
    noise_plus_si_at_relay: float,
    gain_hop2: float,
    interference_at_bob: float,
    params: SystemParams,
) -> float:
    q = 0.5 * params.total_tx_power
    # the relay retransmits signal + self-interference + noise at power q,
    # so its squared amplification is q over the total input power
    amp = q / (q * gain_hop1 + noise_plus_si_at_relay)
    signal = q * amp * gain_hop1 * gain_hop2
    floor = amp * gain_hop2 * noise_plus_si_at_relay + interference_at_bob + params.noise_power
    return signal / floor


def rate_fd_af(
    gain_hop1: float,
    noise_plus_si_at_relay: float,
    gain_hop2: float,
    interference_at_bob: float,
    params: SystemParams,
) -> float:
    """Full-duplex variable-gain amplify-and-forward.

    gain_hop1/gain_hop2 are the channel power gains |h|^2 of the two hops.
    With zero self-interference and zero destination interference this
    collapses to the familiar g1*g2/(g1+g2+1) cascade built from the
    half-power hop SNRs.
    """
    _check_nonnegative(
        gain_hop1=gain_hop1,
        noise_plus_si_at_relay=noise_plus_si_at_relay,
        gain_hop2=gain_hop2,
        interference_at_bob=interference_at_bob,
    )
    return math.log2(1.0 + _fd_af_sinr(
        gain_hop1, noise_plus_si_at_relay, gain_hop2, interference_at_bob, params
    ))


def _require(channels: ChannelSet, spec: SchemeSpec, *, relay: bool, ris: bool) -> None:
    missing = []
    if relay and (channels.alice_relay is None or channels.relay_bob is None):
        missing.append("relay links")
    if ris and len(channels.alice_ris) != channels.num_elements:
        missing.append("surface links")
    if ris and relay and len(channels.ris_relay) != channels.num_elements:
        missing.append("surface-relay links")
    if missing:
        raise ValueError(f"{spec.code} needs {', '.join(missing)} in the channel set")


def _evaluate_ris_only(channels: ChannelSet, params: SystemParams) -> RateResult:
    theta = align_phases(channels.alice_ris, channels.ris_bob)
    cascade = cascaded_channel(channels.alice_ris, theta, channels.ris_bob)
    # passive reflection runs continuously, so the full budget and the full
    # slot are available; no duplex halving
    snr = params.total_tx_power * cascade.magnitude**2 / params.noise_power
    return RateResult(math.log2(1.0 + snr), snr, snr, (theta,))


def _evaluate_relay_only(spec: SchemeSpec, channels: ChannelSet, params: SystemParams) -> RateResult:
    g1 = channels.alice_relay.magnitude ** 2
    g2 = channels.relay_bob.magnitude ** 2
    return _relay_rates(spec, g1, g2, 0.0, params, ())


def _relay_rates(
    spec: SchemeSpec,
    gain_hop1: float,
    gain_hop2: float,
    interference_at_bob: float,
    params: SystemParams,
    phase_config: tuple[RisPhaseVector, ...],
) -> RateResult:
    """Map the two effective hop power gains to the scheme's rate."""
    noise = params.noise_power
    if spec.duplex is Duplex.HALF:
        snr1 = params.total_tx_power * gain_hop1 / noise
        snr2 = params.total_tx_power * gain_hop2 / noise
        rate_fn = rate_hd_df if spec.protocol is Protocol.DECODE_FORWARD else rate_hd_af
        return RateResult(rate_fn(snr1, snr2), snr1, snr2, phase_config)

    q = 0.5 * params.total_tx_power
    relay_floor = noise + params.residual_si_power
    sinr1 = q * gain_hop1 / relay_floor
    if spec.protocol is Protocol.DECODE_FORWARD:
        sinr2 = q * gain_hop2 / (noise + interference_at_bob)
        return RateResult(rate_fd_df(sinr1, sinr2), sinr1, sinr2, phase_config)
    sinr2 = _fd_af_sinr(gain_hop1, relay_floor, gain_hop2, interference_at_bob, params)
    rate = rate_fd_af(gain_hop1, relay_floor, gain_hop2, interference_at_bob, params)
    return RateResult(rate, sinr1, sinr2, phase_config)


def _evaluate_hybrid_hd(spec: SchemeSpec, channels: ChannelSet, params: SystemParams) -> RateResult:
    # each hop gets its own slot, so each gets its own surface configuration
    theta1 = align_phases(channels.alice_ris, channels.ris_relay, reference=channels.alice_relay)
    theta2 = align_phases(channels.ris_relay, channels.ris_bob, reference=channels.relay_bob)
    c1 = cascaded_channel(channels.alice_ris, theta1, channels.ris_relay)
    c2 = cascaded_channel(channels.ris_relay, theta2, channels.ris_bob)
    g1 = abs(channels.alice_relay.value + c1.value) ** 2
    g2 = abs(channels.relay_bob.value + c2.value) ** 2
    return _relay_rates(spec, g1, g2, 0.0, params, (theta1, theta2))


def _evaluate_hybrid_fd(
    spec: SchemeSpec,
    channels: ChannelSet,
    params: SystemParams,
    phase_optimizer: PhaseOptimizer | None,
) -> RateResult:
    h_ar = channels.alice_relay.value
    h_rb = channels.relay_bob.value
    a1 = np.asarray(channels.alice_ris) * np.asarray(channels.ris_relay)
    a2 = np.asarray(channels.ris_relay) * np.asarray(channels.ris_bob)
    leak = np.asarray(channels.alice_ris) * np.asarray(channels.ris_bob)
    q = 0.5 * params.total_tx_power

    def split_gains(theta: np.ndarray) -> tuple[float, float, float]:
        phasor = np.exp(1j * theta)
        g1 = abs(h_ar + np.dot(a1, phasor)) ** 2
        g2 = abs(h_rb + np.dot(a2, phasor)) ** 2
        i_bob = q * abs(np.dot(leak, phasor)) ** 2
        return g1, g2, i_bob

    def objective(theta: np.ndarray) -> float:
        g1, g2, i_bob = split_gains(theta)
        return _relay_rates(spec, g1, g2, i_bob, params, ()).rate

    m = channels.num_elements
    if m == 0:
        best = RisPhaseVector(np.zeros(0))
    else:
        if phase_optimizer is None:
            raise ValueError(f"{spec.code} needs a phase optimizer; none was given")
        # both hops share one configuration, so start one particle from the
        # hop-1 alignment and another from the hop-1/hop-2 compromise
        seed_hop1 = align_phases(channels.alice_ris, channels.ris_relay, reference=channels.alice_relay)
        seed_split = _two_hop_compromise(channels)
        best = phase_optimizer(objective, m, [seed_hop1.phases, seed_split.phases])

    g1, g2, i_bob = split_gains(best.phases)
    result = _relay_rates(spec, g1, g2, i_bob, params, (best,))
    return result


def _two_hop_compromise(channels: ChannelSet) -> RisPhaseVector:
    """Phase guess halfway between the two per-hop alignments.

    Splitting the angular difference leaves each hop a residual error of
    half the gap per element, so both sums keep a positive coherent part.
    """
    align1 = align_phases(channels.alice_ris, channels.ris_relay, reference=channels.alice_relay)
    align2 = align_phases(channels.ris_relay, channels.ris_bob, reference=channels.relay_bob)
    gap = np.mod(align2.phases - align1.phases + math.pi, 2.0 * math.pi) - math.pi
    return RisPhaseVector(align1.phases + 0.5 * gap)


def evaluate_scheme(
    spec: SchemeSpec,
    layout: NetworkLayout,
    channels: ChannelSet,
    params: SystemParams,
    phase_optimizer: PhaseOptimizer | None = None,
) -> RateResult:
    """Achievable rate of one scheme over one channel realization.

    The layout is consulted only for sanity against the scheme (nodes the
    scheme uses must exist); all gains come from the channel set.
    """
    if spec.topology is Topology.RIS_ONLY:
        if layout.ris is None:
            raise ValueError("surface-only scheme on a layout without a surface")
        _require(channels, spec, relay=False, ris=True)
        return _evaluate_ris_only(channels, params)

    if spec.topology is Topology.RELAY_ONLY:
        if layout.relay is None:
            raise ValueError("relay scheme on a layout without a relay")
        _require(channels, spec, relay=True, ris=False)
        return _evaluate_relay_only(spec, channels, params)

    if layout.relay is None or layout.ris is None:
        raise ValueError("hybrid scheme needs both a relay and a surface in the layout")
    _require(channels, spec, relay=True, ris=True)
    if spec.duplex is Duplex.HALF:
        return _evaluate_hybrid_hd(spec, channels, params)
    return _evaluate_hybrid_fd(spec, channels, params, phase_optimizer)
