"""Node placement for the simulated topologies.

All coordinates live in a flat 2-D plane, metres. Alice sits at the origin
and Bob on the positive x axis; helper constructors place the relay and the
reflecting surface for each topology under study.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class Position:
    x: float
    y: float


class RisScenario(Enum):
    """Placement presets for the surface-only topology."""

    NEAR_ALICE = "near-alice"  # surface hugs the transmit side
    MIDPOINT = "midpoint"      # surface halfway along the hop


@dataclass(frozen=True)
class NetworkLayout:
    """Positions of every node present in a topology.

    Absent nodes stay None; consumers must check before use.
    """

    alice: Position
    bob: Position
    relay: Position | None = None
    ris: Position | None = None


def distance(a: Position, b: Position) -> float:
    """Euclidean separation of two nodes in metres."""
    return math.hypot(b.x - a.x, b.y - a.y)


def _check_positive(**lengths: float) -> None:
    bad = [name for name, value in lengths.items() if not value > 0.0]
    if bad:
        raise ValueError(f"lengths must be positive: {', '.join(bad)}")


def symmetric_hrn_layout(d_ab: float, d_ri: float) -> NetworkLayout:
    """Relay and surface mirror each other across the Alice-Bob axis.

    Both sit at the midpoint abscissa separated by d_ri, giving the relay
    (d_ab/2, -d_ri/2) and the surface (d_ab/2, +d_ri/2). Every hop then has
    identical statistics on the Alice side and the Bob side.
    """
    _check_positive(d_ab=d_ab, d_ri=d_ri)
    half = d_ab / 2.0
    return NetworkLayout(
        alice=Position(0.0, 0.0),
        bob=Position(d_ab, 0.0),
        relay=Position(half, -d_ri / 2.0),
        ris=Position(half, d_ri / 2.0),
    )


def ris_assisted_layout(d_ab: float, scenario: RisScenario, d_ri: float) -> NetworkLayout:
    """Surface-only topology, no relay deployed."""
    _check_positive(d_ab=d_ab, d_ri=d_ri)
    if scenario is RisScenario.NEAR_ALICE:
        ris = Position(0.0, d_ri)
    elif scenario is RisScenario.MIDPOINT:
        ris = Position(d_ab / 2.0, d_ri / 2.0)
    else:
        raise ValueError(f"unknown placement scenario: {scenario!r}")
    return NetworkLayout(
        alice=Position(0.0, 0.0),
        bob=Position(d_ab, 0.0),
        ris=ris,
    )


def relay_assisted_layout(d_ab: float) -> NetworkLayout:
    """Relay-only topology with the relay at the segment midpoint."""
    _check_positive(d_ab=d_ab)
    return NetworkLayout(
        alice=Position(0.0, 0.0),
        bob=Position(d_ab, 0.0),
        relay=Position(d_ab / 2.0, 0.0),
    )
