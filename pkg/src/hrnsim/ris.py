"""Passive beamforming math for the reflecting surface.

Cells reflect with unit amplitude, so a configuration is just a phase
vector. The cascade through the surface is the phased sum of per-element
two-bounce paths; with phases matched to a reference the element amplitudes
add coherently, which is the best any passive configuration can do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import TWO_PI, ComplexCoefficient


@dataclass(frozen=True)
class RisPhaseVector:
    """Per-element phase shifts, wrapped into [0, 2*pi)."""

    phases: np.ndarray

    def __post_init__(self):
        wrapped = np.mod(np.asarray(self.phases, dtype=float), TWO_PI)
        object.__setattr__(self, "phases", wrapped)

    def __len__(self) -> int:
        return len(self.phases)


def _as_complex(h) -> np.ndarray:
    """Accept complex vectors or ComplexCoefficient sequences."""
    arr = np.asarray(h)
    if arr.dtype == object:
        return np.array([c.value for c in arr], dtype=complex)
    return arr.astype(complex)


def _phases_of(theta) -> np.ndarray:
    if isinstance(theta, RisPhaseVector):
        return theta.phases
    return np.mod(np.asarray(theta, dtype=float), TWO_PI)


def cascaded_channel(h_in, theta, h_out) -> ComplexCoefficient:
    """Effective channel of the two-bounce path through every element.

    Returns sum_m e^{j*theta_m} h_in[m] h_out[m] as a single coefficient.
    Its magnitude never exceeds sum_m |h_in[m]||h_out[m]| (triangle
    inequality), the coherent bound that align_phases attains.
    """
    a = _as_complex(h_in)
    b = _as_complex(h_out)
    ph = _phases_of(theta)
    if not (a.shape == b.shape == ph.shape):
        raise ValueError(
            f"element count mismatch: in={a.shape}, theta={ph.shape}, out={b.shape}"
        )
    total = np.sum(a * b * np.exp(1j * ph))
    return ComplexCoefficient.from_complex(complex(total))


def coherent_cascade_bound(h_in, h_out) -> float:
    """Largest cascade magnitude any phase configuration can reach."""
    return float(np.sum(np.abs(_as_complex(h_in) * _as_complex(h_out))))


def align_phases(h_in, h_out, reference=None) -> RisPhaseVector:
    """Closed-form phase choice that co-phases all elements.

    theta_m = arg(reference) - arg(h_in[m] h_out[m]) puts every element
    contribution on the reference phasor, so cascade and reference add by
    magnitude. Without a reference the target phase is 0. Elements whose
    product vanishes contribute nothing and get theta_m = 0.
    """
    prod = _as_complex(h_in) * _as_complex(h_out)
    if reference is None:
        ref_phase = 0.0
    elif isinstance(reference, ComplexCoefficient):
        ref_phase = reference.phase
    else:
        ref_phase = float(np.angle(complex(reference)))
    theta = np.where(np.abs(prod) > 0.0, ref_phase - np.angle(prod), 0.0)
    return RisPhaseVector(theta)


def hybrid_hop_gain(
    beta_direct: float, beta_in: float, beta_out: float, num_elements: int
) -> float:
    """Single-hop power gain of a direct path reinforced by M aligned cells.

    In the far field every element sees the same sub-link gains, so under
    coherent alignment the amplitudes add:

        beta_H = (sqrt(beta_direct) + M * sqrt(beta_in * beta_out))^2

    The M^2 growth of the reflected term is what eventually buries the
    direct path; with beta_direct = 0 the gain is exactly M^2 beta_in beta_out.
    """
    if num_elements < 0:
        raise ValueError("element count must be non-negative")
    if beta_direct < 0.0 or beta_in < 0.0 or beta_out < 0.0:
        raise ValueError("link gains must be non-negative")
    amplitude = math.sqrt(beta_direct) + num_elements * math.sqrt(beta_in * beta_out)
    return amplitude * amplitude
