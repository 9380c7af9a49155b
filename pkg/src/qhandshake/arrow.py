"""Elastic-gas experiment: entropy growth under pre-collision velocity
chaos, and the arrow flip under exact time-reversed replay.

The gas is mean-field: collision partners are drawn uniformly at random
(velocity histories are ignored, which is the "uncorrelated before" choice),
and each equal-mass pair scatters elastically through a uniformly random
angle. Recording every collision makes the run exactly reversible: negate
all velocities and replay the records backwards with negated angles, and the
same dynamics now satisfies the chaos property after collisions instead of
before, so the H-function trend reverses.

H is computed from a fixed joint histogram over speed and direction. The
direction classifier is built from half-plane sign predicates rather than
atan2 so that negating every velocity permutes sectors by exactly 8 (mod
16); H is then invariant under global velocity negation up to summation
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RandomSource

__all__ = [
    "GasState",
    "CollisionRecord",
    "HTrace",
    "VelocityBinning",
    "ForwardRun",
    "ReverseRun",
    "ReplayMismatchError",
    "two_delta_state",
    "h_value",
    "apply_collision",
    "collide_pre_chaos",
    "simulate_forward",
    "reverse_replay",
    "maxwell_reference_h",
]

_TWO_PI = 2.0 * math.pi

# Upper-half-plane sector boundaries at k*pi/8, k = 1..7.
_BOUNDARY_COS = np.array([math.cos(k * math.pi / 8.0) for k in range(1, 8)])
_BOUNDARY_SIN = np.array([math.sin(k * math.pi / 8.0) for k in range(1, 8)])


class ReplayMismatchError(Exception):
    """The collision history is not a consistent record of a forward run."""


@dataclass(eq=False)
class GasState:
    """N particles with 2-D velocities, shape (N, 2) float64."""

    velocities: np.ndarray

    @property
    def n(self) -> int:
        return self.velocities.shape[0]

    def kinetic_energy(self) -> float:
        return float(0.5 * np.sum(self.velocities**2))

    def momentum(self) -> tuple[float, float]:
        px, py = self.velocities.sum(axis=0)
        return float(px), float(py)

    def copy(self) -> "GasState":
        return GasState(self.velocities.copy())

    def negated(self) -> "GasState":
        return GasState(-self.velocities)


# Mid-sector launch angle. On-axis starts would sit exactly on a direction
# bin boundary, where 1-ulp replay rounding could flip sectors.
_LAUNCH_ANGLE = math.pi / 16.0


def two_delta_state(n: int, speed: float = 1.0) -> GasState:
    """Low-entropy start: every particle at the same speed, in one of two
    opposite directions (half and half)."""
    if n < 2:
        raise ValueError("need at least 2 particles")
    v = np.zeros((n, 2))
    vx = speed * math.cos(_LAUNCH_ANGLE)
    vy = speed * math.sin(_LAUNCH_ANGLE)
    half = (n + 1) // 2
    v[:half, 0] = vx
    v[:half, 1] = vy
    v[half:, 0] = -vx
    v[half:, 1] = -vy
    return GasState(v)


@dataclass(frozen=True)
class CollisionRecord:
    step: int
    i: int
    j: int
    phi: float


@dataclass(frozen=True)
class HTrace:
    """H sampled along a run: ((collision_count, H), ...)."""

    entries: tuple[tuple[int, float], ...]

    def steps(self) -> list[int]:
        return [s for s, _ in self.entries]

    def values(self) -> list[float]:
        return [h for _, h in self.entries]


@dataclass(frozen=True)
class VelocityBinning:
    """Fixed binning for the velocity histogram: equal-width speed bins up
    to v_max (faster particles land in the top bin) crossed with equal
    direction sectors. Freeze one binning per experiment so every H along a
    run, forward or reversed, is measured identically."""

    v_max: float
    n_speed: int = 32
    n_sector: int = 16

    def __post_init__(self) -> None:
        if self.v_max <= 0.0:
            raise ValueError("v_max must be positive")
        if self.n_speed < 1 or self.n_sector not in (1, 16):
            raise ValueError("unsupported binning shape")

    @classmethod
    def from_state(cls, state: GasState, rms_multiple: float = 3.0) -> "VelocityBinning":
        rms = math.sqrt(float(np.mean(np.sum(state.velocities**2, axis=1))))
        if rms == 0.0:
            raise ValueError("cannot bin an all-zero velocity state")
        return cls(v_max=rms_multiple * rms)

    def sector_indices(self, velocities: np.ndarray) -> np.ndarray:
        vx = velocities[:, 0]
        vy = velocities[:, 1]
        upper = (vy > 0.0) | ((vy == 0.0) & (vx > 0.0))
        # Reflect lower-half vectors through the origin before classifying,
        # so negating a velocity shifts its sector by exactly 8.
        sx = np.where(upper, vx, -vx)
        sy = np.where(upper, vy, -vy)
        idx = np.zeros(len(velocities), dtype=np.int64)
        for c, s in zip(_BOUNDARY_COS, _BOUNDARY_SIN):
            idx += (c * sy - s * sx) >= 0.0
        idx = np.where(upper, idx, idx + 8)
        idx[(vx == 0.0) & (vy == 0.0)] = 0
        return idx

    def histogram_fractions(self, state: GasState) -> np.ndarray:
        """Occupancy fractions of the n_speed x n_sector joint bins."""
        speeds = np.hypot(state.velocities[:, 0], state.velocities[:, 1])
        speed_idx = np.minimum(
            (speeds * (self.n_speed / self.v_max)).astype(np.int64), self.n_speed - 1
        )
        if self.n_sector == 1:
            flat = speed_idx
        else:
            flat = speed_idx * self.n_sector + self.sector_indices(state.velocities)
        counts = np.bincount(flat, minlength=self.n_speed * self.n_sector)
        return counts / state.n

    def h_of_state(self, state: GasState) -> float:
        return h_value(self.histogram_fractions(state))


def h_value(fractions) -> float:
    """Boltzmann H of a histogram: sum of f*ln(f) over occupied bins."""
    f = np.asarray(fractions, dtype=np.float64)
    nz = f[f > 0.0]
    return float(np.sum(nz * np.log(nz)))


def apply_collision(state: GasState, i: int, j: int, phi: float) -> None:
    """Equal-mass 2-D elastic collision: keep the pair's center-of-mass
    velocity, rotate the relative velocity by phi. In place."""
    v = state.velocities
    vix, viy = float(v[i, 0]), float(v[i, 1])
    vjx, vjy = float(v[j, 0]), float(v[j, 1])
    cmx, cmy = 0.5 * (vix + vjx), 0.5 * (viy + vjy)
    rx, ry = vix - vjx, viy - vjy
    c, s = math.cos(phi), math.sin(phi)
    rrx, rry = c * rx - s * ry, s * rx + c * ry
    v[i, 0], v[i, 1] = cmx + 0.5 * rrx, cmy + 0.5 * rry
    v[j, 0], v[j, 1] = cmx - 0.5 * rrx, cmy - 0.5 * rry


def collide_pre_chaos(
    state: GasState, rng: RandomSource, step: int = 0
) -> tuple[GasState, CollisionRecord]:
    """One collision under the uncorrelated-before assumption: the pair is
    uniform over all unordered pairs regardless of velocity history, the
    scattering angle uniform in [0, 2*pi)."""
    n = state.n
    if n < 2:
        raise ValueError("need at least 2 particles")
    i = rng.next_below(n)
    j = rng.next_below(n - 1)
    if j >= i:
        j += 1
    phi = _TWO_PI * rng.uniform()
    apply_collision(state, i, j, phi)
    return state, CollisionRecord(step=step, i=i, j=j, phi=phi)


@dataclass(frozen=True)
class ForwardRun:
    initial: GasState
    final: GasState
    trace: HTrace
    records: tuple[CollisionRecord, ...]
    binning: VelocityBinning
    record_every: int


@dataclass(frozen=True)
class ReverseRun:
    trace: HTrace
    end_state: GasState


def _trace_marks(steps: int, record_every: int) -> list[int]:
    marks = list(range(0, steps + 1, record_every))
    if marks[-1] != steps:
        marks.append(steps)
    return marks


def simulate_forward(
    n_particles: int,
    steps: int,
    rng: RandomSource,
    init: str = "two_delta",
    initial_velocities: np.ndarray | None = None,
    record_every: int | None = None,
    speed: float = 1.0,
) -> ForwardRun:
    """Run `steps` random collisions from a low-entropy start, sampling H
    every n/10 collisions (by default) and keeping the full history."""
    if n_particles < 100:
        raise ValueError("need at least 100 particles for a meaningful trace")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if init == "two_delta":
        state = two_delta_state(n_particles, speed=speed)
    elif init == "custom":
        if initial_velocities is None or initial_velocities.shape != (n_particles, 2):
            raise ValueError("custom init requires an (n, 2) velocity array")
        state = GasState(np.array(initial_velocities, dtype=np.float64))
    else:
        raise ValueError(f"unknown init {init!r}")

    initial = state.copy()
    binning = VelocityBinning.from_state(initial)
    if record_every is None:
        record_every = max(1, n_particles // 10)
    marks = _trace_marks(steps, record_every)

    entries: list[tuple[int, float]] = []
    records: list[CollisionRecord] = []
    next_mark = 0
    for step in range(steps + 1):
        if step == marks[next_mark]:
            entries.append((step, binning.h_of_state(state)))
            next_mark += 1
        if step == steps:
            break
        _, record = collide_pre_chaos(state, rng, step=step)
        records.append(record)

    return ForwardRun(
        initial=initial,
        final=state,
        trace=HTrace(entries=tuple(entries)),
        records=tuple(records),
        binning=binning,
        record_every=record_every,
    )


def _check_history(n: int, records: tuple[CollisionRecord, ...]) -> None:
    for k, rec in enumerate(records):
        if rec.step != k:
            raise ReplayMismatchError(f"record {k} carries step {rec.step}")
        if not (0 <= rec.i < n and 0 <= rec.j < n) or rec.i == rec.j:
            raise ReplayMismatchError(f"record {k} has bad pair ({rec.i}, {rec.j})")


def reverse_replay(
    initial: GasState,
    records: tuple[CollisionRecord, ...],
    binning: VelocityBinning | None = None,
    record_every: int | None = None,
) -> ReverseRun:
    """Time-reverse the recorded run: rebuild the final state, negate every
    velocity, then undo the collisions newest-first with negated scattering
    angles, sampling H at the forward cadence. Along this trajectory the
    chaos property holds after collisions, and the H trend flips."""
    _check_history(initial.n, records)
    if binning is None:
        binning = VelocityBinning.from_state(initial)
    if record_every is None:
        record_every = max(1, initial.n // 10)

    state = initial.copy()
    for rec in records:
        apply_collision(state, rec.i, rec.j, rec.phi)
    state = state.negated()

    steps = len(records)
    marks = _trace_marks(steps, record_every)
    entries: list[tuple[int, float]] = []
    next_mark = 0
    for step in range(steps + 1):
        if step == marks[next_mark]:
            entries.append((step, binning.h_of_state(state)))
            next_mark += 1
        if step == steps:
            break
        rec = records[steps - 1 - step]
        apply_collision(state, rec.i, rec.j, -rec.phi)

    return ReverseRun(trace=HTrace(entries=tuple(entries)), end_state=state)


def maxwell_reference_h(
    n: int,
    kinetic_energy: float,
    binning: VelocityBinning,
    np_rng: np.random.Generator,
    draws: int = 64,
) -> float:
    """Independent equilibrium reference: H of n velocities drawn from the
    2-D Maxwell distribution, projected onto the gas's conserved totals
    (zero net momentum, exact kinetic energy), averaged over several draws
    so the finite-sample bias matches an n-particle histogram while the
    draw-to-draw noise averages out."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    values = []
    for _ in range(draws):
        v = np_rng.normal(size=(n, 2))
        v -= v.mean(axis=0)
        ke = 0.5 * float(np.sum(v**2))
        v *= math.sqrt(kinetic_energy / ke)
        values.append(binning.h_of_state(GasState(v)))
    return float(np.mean(values))
