"""Link budgets and deterministic channel realizations.

Conventions: distances in metres, powers in watts, antenna gains in dBi at
the call surface but linear internally. A "gain" is a linear received/
transmitted power ratio, so path loss in dB is -10*log10(gain) before
antenna gains are applied.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import NetworkLayout, distance

SPEED_OF_LIGHT = 299792458.0
TWO_PI = 2.0 * math.pi


def db2lin(value_db: float) -> float:
    """Decibels to linear power ratio."""
    return 10.0 ** (value_db / 10.0)


def lin2db(value: float) -> float:
    """Linear power ratio to decibels."""
    return 10.0 * math.log10(value)


def dbm2watt(power_dbm: float) -> float:
    return 10.0 ** (power_dbm / 10.0) / 1000.0


def watt2dbm(power_watt: float) -> float:
    return 10.0 * math.log10(power_watt * 1000.0)


# -94 dBm thermal floor (20 MHz front end with a typical noise figure)
DEFAULT_NOISE_POWER_W = dbm2watt(-94.0)


@dataclass
class SystemParams:
    """Radio constants shared by every scheme evaluation.

    residual_si_power is the loop self-interference left after cancellation
    at a full-duplex relay, already converted to an absolute level.
    """

    total_tx_power: float = 1.0                       # P_T, watts
    carrier_frequency: float = 3.0e9                  # Hz
    noise_power: float = DEFAULT_NOISE_POWER_W        # sigma^2, watts
    residual_si_power: float = DEFAULT_NOISE_POWER_W  # watts
    gain_alice_dbi: float = 0.0
    gain_bob_dbi: float = 0.0
    gain_relay_dbi: float = 5.0
    gain_ris_dbi: float = 5.0
    rng_seed: int = 0

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @classmethod
    def from_link_budget(
        cls,
        pt_dbm: float,
        *,
        noise_dbm: float = -94.0,
        si_over_noise_db: float = 0.0,
        **kwargs,
    ) -> "SystemParams":
        """Build params from the usual link-budget units (dBm and dB)."""
        noise = dbm2watt(noise_dbm)
        return cls(
            total_tx_power=dbm2watt(pt_dbm),
            noise_power=noise,
            residual_si_power=noise * db2lin(si_over_noise_db),
            **kwargs,
        )


@dataclass(frozen=True)
class LinkGain:
    """Linear power gain of a single link.

    clamped marks results where the requested distance fell below the
    model's validity floor and was evaluated at the floor instead.
    """

    value: float
    clamped: bool = False

    def __post_init__(self):
        if not self.value > 0.0:
            raise ValueError(f"link gain must be positive, got {self.value!r}")

    @property
    def db(self) -> float:
        return lin2db(self.value)


@dataclass(frozen=True)
class ComplexCoefficient:
    """Amplitude-domain channel coefficient."""

    magnitude: float
    phase: float  # radians in [0, 2*pi)

    def __post_init__(self):
        if self.magnitude < 0.0:
            raise ValueError("magnitude must be non-negative")
        object.__setattr__(self, "phase", self.phase % TWO_PI)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexCoefficient":
        return cls(abs(z), cmath.phase(z) % TWO_PI)

    @property
    def value(self) -> complex:
        return self.magnitude * cmath.exp(1j * self.phase)


class ChannelModel(Enum):
    FREE_SPACE = "free_space"
    UMI = "umi"


def free_space_gain(
    d: float,
    gain_tx_dbi: float,
    gain_rx_dbi: float,
    carrier_frequency: float = 3.0e9,
) -> LinkGain:
    """Friis power gain over an unobstructed path.

    gain = G_tx * G_rx * (lambda / (4*pi*d))^2. Unity (0 dB) at
    d = lambda/(4*pi) for isotropic ends; no validity floor is enforced
    because the law itself has none.
    """
    if not d > 0.0:
        raise ValueError(f"free-space model needs d > 0, got {d!r}")
    lam = SPEED_OF_LIGHT / carrier_frequency
    spread = (lam / (4.0 * math.pi * d)) ** 2
    return LinkGain(db2lin(gain_tx_dbi + gain_rx_dbi) * spread)


# TR 38.901 street-canyon fits at 1.5 m terminal height, which zeroes the
# height correction term. Shadow fading intentionally omitted: one layout
# must map to one deterministic gain.
_UMI_LOS_OFFSET = 32.4
_UMI_LOS_DIST_SLOPE = 21.0
_UMI_LOS_FREQ_SLOPE = 20.0
_UMI_NLOS_OFFSET = 22.4
_UMI_NLOS_DIST_SLOPE = 35.3
_UMI_NLOS_FREQ_SLOPE = 21.3
_UMI_MIN_DISTANCE = 1.0


def umi_gain(
    d: float,
    los: bool,
    gain_tx_dbi: float,
    gain_rx_dbi: float,
    carrier_frequency: float = 3.0e9,
) -> LinkGain:
    """Urban-micro street-canyon path gain, LoS or NLoS.

    Distances under the 1 m validity floor are clamped to the floor and the
    returned gain carries clamped=True so callers can surface the warning.
    """
    clamped = d < _UMI_MIN_DISTANCE
    d_eff = max(d, _UMI_MIN_DISTANCE)
    f_ghz = carrier_frequency / 1e9
    if los:
        pl_db = (
            _UMI_LOS_OFFSET
            + _UMI_LOS_DIST_SLOPE * math.log10(d_eff)
            + _UMI_LOS_FREQ_SLOPE * math.log10(f_ghz)
        )
    else:
        pl_db = (
            _UMI_NLOS_OFFSET
            + _UMI_NLOS_DIST_SLOPE * math.log10(d_eff)
            + _UMI_NLOS_FREQ_SLOPE * math.log10(f_ghz)
        )
    return LinkGain(db2lin(gain_tx_dbi + gain_rx_dbi - pl_db), clamped=clamped)


@dataclass(frozen=True)
class LosMap:
    """Blockage state per link, consulted only by the UMi model.

    The default reflects the deployment assumption that the surface is
    mounted high enough to keep clear paths while the street-level relay
    links stay blocked.
    """

    alice_relay: bool = False
    relay_bob: bool = False
    alice_ris: bool = True
    ris_relay: bool = True
    ris_bob: bool = True


@dataclass(eq=False)
class ChannelSet:
    """One deterministic draw of every link a topology needs.

    Element-wise surface links are complex vectors of length M, all measured
    to the surface reference point (far-field assumption, common magnitude).
    relay_loop_reflected records the relay-tx -> surface -> relay-rx round
    trip for reference only; the rate models fold relay self-interference
    into the fixed residual term instead of re-deriving it from this vector.
    """

    alice_relay: ComplexCoefficient | None
    relay_bob: ComplexCoefficient | None
    alice_ris: np.ndarray
    ris_relay: np.ndarray
    ris_bob: np.ndarray
    relay_loop_reflected: np.ndarray
    num_elements: int


def link_gain(
    model: ChannelModel,
    d: float,
    los: bool,
    gain_tx_dbi: float,
    gain_rx_dbi: float,
    carrier_frequency: float = 3.0e9,
) -> LinkGain:
    """Dispatch to the requested path model; los only matters for UMi."""
    if model is ChannelModel.FREE_SPACE:
        return free_space_gain(d, gain_tx_dbi, gain_rx_dbi, carrier_frequency)
    if model is ChannelModel.UMI:
        return umi_gain(d, los, gain_tx_dbi, gain_rx_dbi, carrier_frequency)
    raise ValueError(f"unknown channel model: {model!r}")


def build_channel_set(
    layout: NetworkLayout,
    model: ChannelModel,
    num_elements: int,
    params: SystemParams,
    los: LosMap | None = None,
) -> ChannelSet:
    """Draw the deterministic channel realization for a layout.

    Magnitudes come straight from the path model; phases are uniform on
    [0, 2*pi) from a generator seeded with params.rng_seed. Links are drawn
    in a fixed order (alice-relay, relay-bob, then the three element
    vectors) so one seed always yields the bit-identical set.
    """
    if num_elements < 0:
        raise ValueError("element count must be non-negative")
    los = los or LosMap()
    rng = np.random.default_rng(params.rng_seed)
    fc = params.carrier_frequency
    empty = np.zeros(0, dtype=complex)

    def scalar_link(a, b, gtx, grx, flag) -> ComplexCoefficient:
        gain = link_gain(model, distance(a, b), flag, gtx, grx, fc)
        return ComplexCoefficient(math.sqrt(gain.value), rng.uniform(0.0, TWO_PI))

    def element_link(a, b, gtx, grx, flag) -> np.ndarray:
        gain = link_gain(model, distance(a, b), flag, gtx, grx, fc)
        phases = rng.uniform(0.0, TWO_PI, num_elements)
        return math.sqrt(gain.value) * np.exp(1j * phases)

    alice_relay = relay_bob = None
    alice_ris = ris_relay = ris_bob = loop = empty

    if layout.relay is not None:
        alice_relay = scalar_link(
            layout.alice, layout.relay,
            params.gain_alice_dbi, params.gain_relay_dbi, los.alice_relay,
        )
        relay_bob = scalar_link(
            layout.relay, layout.bob,
            params.gain_relay_dbi, params.gain_bob_dbi, los.relay_bob,
        )
    if layout.ris is not None:
        alice_ris = element_link(
            layout.alice, layout.ris,
            params.gain_alice_dbi, params.gain_ris_dbi, los.alice_ris,
        )
        if layout.relay is not None:
            ris_relay = element_link(
                layout.ris, layout.relay,
                params.gain_ris_dbi, params.gain_relay_dbi, los.ris_relay,
            )
        ris_bob = element_link(
            layout.ris, layout.bob,
            params.gain_ris_dbi, params.gain_bob_dbi, los.ris_bob,
        )
        if layout.relay is not None:
            # reciprocal round trip through each element; reference only
            loop = ris_relay * ris_relay

    return ChannelSet(
        alice_relay=alice_relay,
        relay_bob=relay_bob,
        alice_ris=alice_ris,
        ris_relay=ris_relay,
        ris_bob=ris_bob,
        relay_loop_reflected=loop,
        num_elements=num_elements,
    )
