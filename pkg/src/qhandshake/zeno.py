"""Repeated projective measurement of a rotating two-level state.

A trial starts in the ground state, alternates a small rotation with a
projective measurement N times, and survives when every outcome is ZERO.
Frequent measurement resets the rotation before it can accumulate, so the
survival fraction climbs toward 1 as N grows: the evolution freezes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Amplitude, RandomSource, amp_add, amp_scale, norm_sq

__all__ = [
    "MeasureOutcome",
    "TwoLevelState",
    "GROUND",
    "EXCITED",
    "evolve",
    "measure",
    "zeno_trial",
    "zeno_run",
    "expected_survival",
]

_NORM_TOL = 1e-12


class MeasureOutcome(enum.Enum):
    ZERO = 0
    ONE = 1


@dataclass(frozen=True)
class TwoLevelState:
    """Normalized amplitudes on the |0> and |1> basis states."""

    a: Amplitude
    b: Amplitude

    def __post_init__(self) -> None:
        total = norm_sq(self.a) + norm_sq(self.b)
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm^2 is {total}, not 1")


GROUND = TwoLevelState(Amplitude(1.0), Amplitude(0.0))
EXCITED = TwoLevelState(Amplitude(0.0), Amplitude(1.0))


def evolve(s: TwoLevelState, theta: float) -> TwoLevelState:
    """Rotate the state by theta in the real |0>,|1> plane; norm-preserving."""
    c, sn = math.cos(theta), math.sin(theta)
    return TwoLevelState(
        a=amp_add(amp_scale(s.a, c), amp_scale(s.b, -sn)),
        b=amp_add(amp_scale(s.a, sn), amp_scale(s.b, c)),
    )


def measure(s: TwoLevelState, rng: RandomSource) -> tuple[MeasureOutcome, TwoLevelState]:
    """Projective measurement in the computational basis: ZERO with
    probability |a|^2, and the state collapses to exactly |0> or |1>."""
    if rng.uniform() < norm_sq(s.a):
        return MeasureOutcome.ZERO, GROUND
    return MeasureOutcome.ONE, EXCITED


def zeno_trial(theta_total: float, n_measure: int, rng: RandomSource) -> bool:
    """One literal trial: N rotate-then-measure steps from |0>. Survives when
    every outcome is ZERO. Consumes exactly one uniform per step."""
    if n_measure < 1:
        raise ValueError("n_measure must be >= 1")
    step = theta_total / n_measure
    state = GROUND
    survived = True
    for _ in range(n_measure):
        state = evolve(state, step)
        outcome, state = measure(state, rng)
        if outcome is MeasureOutcome.ONE:
            survived = False
    return survived


def zeno_run(theta_total: float, n_measure: int, trials: int, rng: RandomSource) -> float:
    """Survival fraction over many trials, vectorized across trials.

    Each step's ZERO probability comes from the actual rotate-and-project
    mechanics (a surviving trial is collapsed back to exactly |0>, so one
    Born weight serves every live trial). The stream is consumed step-major:
    one uniform per trial per step, drawn in blocks; trials that already
    failed keep consuming draws so the layout is fixed.
    """
    if n_measure < 1:
        raise ValueError("n_measure must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_zero = norm_sq(evolve(GROUND, theta_total / n_measure).a)
    alive = np.ones(trials, dtype=bool)
    for _ in range(n_measure):
        u = rng.uniform_block(trials)
        alive &= u < p_zero
    return int(alive.sum()) / trials


def expected_survival(theta_total: float, n_measure: int) -> float:
    """Closed-form survival probability (cos^2(theta/N))^N."""
    return math.cos(theta_total / n_measure) ** (2 * n_measure)
