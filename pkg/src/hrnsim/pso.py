"""Global-best particle swarm search over periodic phase vectors.

The search space is [0, 2*pi)^dim and genuinely periodic, so positions wrap
around instead of reflecting and the pulls toward personal and global bests
take the short way around the circle. The per-dimension velocity clamp is
the knob that keeps late-stage steps small enough to settle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .channels import TWO_PI
from .ris import RisPhaseVector

FitnessFn = Callable[[np.ndarray], float]


@dataclass
class PsoParams:
    particle_count: int = 500
    iteration_count: int = 100
    velocity_clamp: float = math.pi / 8.0  # max |step| per dimension
    inertia_start: float = 0.9             # linear decay start ...
    inertia_end: float = 0.4               # ... and end
    cognitive: float = 2.0
    social: float = 2.0
    seed: int = 0

    def validate(self) -> None:
        bad = []
        if self.particle_count < 1:
            bad.append("particle_count")
        if self.iteration_count < 1:
            bad.append("iteration_count")
        if not self.velocity_clamp > 0.0:
            bad.append("velocity_clamp")
        if bad:
            raise ValueError(f"invalid swarm parameters: {', '.join(bad)}")


class NonFiniteFitnessError(RuntimeError):
    """Raised when the objective returns nan or inf; aborts the search."""

    def __init__(self, vector: np.ndarray, value: float):
        self.vector = np.array(vector, copy=True)
        self.value = value
        super().__init__(
            "fitness returned non-finite value "
            f"{value!r} at theta={np.array2string(self.vector, precision=4)}"
        )


class PsoResult(NamedTuple):
    best: RisPhaseVector
    best_fitness: float
    trace: list[float]  # global best after init, then after each iteration


def _wrap_short_way(delta: np.ndarray) -> np.ndarray:
    """Map phase differences into (-pi, pi]."""
    return np.mod(delta + math.pi, TWO_PI) - math.pi


def _evaluate_swarm(fitness: FitnessFn, positions: np.ndarray) -> np.ndarray:
    values = np.empty(len(positions))
    for i, theta in enumerate(positions):
        value = float(fitness(theta))
        if not math.isfinite(value):
            raise NonFiniteFitnessError(theta, value)
        values[i] = value
    return values


def optimize(
    fitness: FitnessFn,
    dim: int,
    params: PsoParams,
    initial_positions: Sequence[np.ndarray] | None = None,
) -> PsoResult:
    """Maximize fitness over [0, 2*pi)^dim.

    initial_positions, when given, fill the first swarm slots with
    hand-picked guesses (the rest stay uniform random), which guarantees the
    result is at least as good as the best guess. The run is deterministic
    for a fixed seed and costs exactly particle_count evaluations at
    initialization plus particle_count * iteration_count afterwards. The
    returned trace is non-decreasing by construction.
    """
    params.validate()
    if dim < 0:
        raise ValueError("dimension must be non-negative")
    if dim == 0:
        empty = RisPhaseVector(np.zeros(0))
        value = float(fitness(empty.phases))
        return PsoResult(empty, value, [value] * (params.iteration_count + 1))

    rng = np.random.default_rng(params.seed)
    count = params.particle_count
    clamp = params.velocity_clamp

    x = rng.uniform(0.0, TWO_PI, (count, dim))
    if initial_positions is not None:
        for slot, guess in enumerate(initial_positions[:count]):
            guess = np.asarray(guess, dtype=float)
            if guess.shape != (dim,):
                raise ValueError(
                    f"seed position {slot} has shape {guess.shape}, expected ({dim},)"
                )
            x[slot] = np.mod(guess, TWO_PI)
    v = rng.uniform(-clamp, clamp, (count, dim))

    values = _evaluate_swarm(fitness, x)
    pbest_x = x.copy()
    pbest_f = values.copy()
    g = int(np.argmax(pbest_f))
    gbest_x = pbest_x[g].copy()
    gbest_f = float(pbest_f[g])
    trace = [gbest_f]

    iters = params.iteration_count
    for it in range(iters):
        if iters > 1:
            w = params.inertia_start + (params.inertia_end - params.inertia_start) * it / (iters - 1)
        else:
            w = params.inertia_start
        r1 = rng.random((count, dim))
        r2 = rng.random((count, dim))
        v = (
            w * v
            + params.cognitive * r1 * _wrap_short_way(pbest_x - x)
            + params.social * r2 * _wrap_short_way(gbest_x[None, :] - x)
        )
        np.clip(v, -clamp, clamp, out=v)
        x = np.mod(x + v, TWO_PI)

        values = _evaluate_swarm(fitness, x)
        improved = values > pbest_f
        pbest_x[improved] = x[improved]
        pbest_f[improved] = values[improved]
        # synchronous global update: one synchronization point per iteration
        g = int(np.argmax(pbest_f))
        if float(pbest_f[g]) > gbest_f:
            gbest_f = float(pbest_f[g])
            gbest_x = pbest_x[g].copy()
        trace.append(gbest_f)

    return PsoResult(RisPhaseVector(gbest_x), gbest_f, trace)


def phase_optimizer(params: PsoParams):
    """Adapt the swarm to the optimizer-handle shape rate models expect.

    The returned callable takes (fitness, dim, seed_positions) and hands
    back the best phase vector found.
    """

    def run(fitness: FitnessFn, dim: int, seeds: Sequence[np.ndarray]) -> RisPhaseVector:
        return optimize(fitness, dim, params, initial_positions=seeds).best

    return run
