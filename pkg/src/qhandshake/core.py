"""Foundational value types: amplitudes, lattice events, conserved quanta,
emitter/absorber entities, and the seedable random source.

All value types are immutable after construction and safe to share across
threads. Conserved quantities are exact integers so that conservation checks
are exact equalities, never tolerance comparisons. The lattice convention is
one cell per site, one tick per step, signal speed c = 1 cell/tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Amplitude",
    "SpacetimeEvent",
    "QuantaBundle",
    "Emitter",
    "Absorber",
    "RandomSource",
    "AMP_ZERO",
    "AMP_ONE",
    "ZERO_BUNDLE",
    "conj",
    "norm_sq",
    "mul",
    "amp_add",
    "amp_scale",
    "bundle_add",
    "bundle_neg",
    "bundle_within",
    "derive_seed",
]

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1


@dataclass(frozen=True)
class Amplitude:
    """A complex wave amplitude. Components must be finite."""

    re: float
    im: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError(f"amplitude components must be finite, got ({self.re}, {self.im})")


AMP_ZERO = Amplitude(0.0, 0.0)
AMP_ONE = Amplitude(1.0, 0.0)


def conj(a: Amplitude) -> Amplitude:
    """Complex conjugate."""
    return Amplitude(a.re, -a.im)


def norm_sq(a: Amplitude) -> float:
    """Squared magnitude re^2 + im^2; always a nonnegative real."""
    return a.re * a.re + a.im * a.im


def mul(a: Amplitude, b: Amplitude) -> Amplitude:
    """Complex product. Raises ValueError if the product overflows to non-finite."""
    return Amplitude(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)


def amp_add(a: Amplitude, b: Amplitude) -> Amplitude:
    return Amplitude(a.re + b.re, a.im + b.im)


def amp_scale(a: Amplitude, k: float) -> Amplitude:
    """Scale by a real factor."""
    return Amplitude(a.re * k, a.im * k)


@dataclass(frozen=True, order=True)
class SpacetimeEvent:
    """A lattice point (site, tick). Coordinates are exact signed integers."""

    site: int
    tick: int

    def __post_init__(self) -> None:
        if not isinstance(self.site, int) or not isinstance(self.tick, int):
            raise TypeError("event coordinates must be integers")


def _check_int64(value: int, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"{what} must be an integer, got {value!r}")
    if not INT64_MIN <= value <= INT64_MAX:
        raise OverflowError(f"{what} {value} outside signed 64-bit range")
    return value


@dataclass(frozen=True)
class QuantaBundle:
    """Exact-integer conserved quantities: energy and momentum quanta, spin-z
    in units of hbar/2. Components are bounded to signed 64 bits; arithmetic
    that would leave that range raises OverflowError rather than wrapping.
    """

    energy: int = 0
    momentum: int = 0
    spin_z: int = 0

    def __post_init__(self) -> None:
        _check_int64(self.energy, "energy")
        _check_int64(self.momentum, "momentum")
        _check_int64(self.spin_z, "spin_z")

    def is_zero(self) -> bool:
        return self.energy == 0 and self.momentum == 0 and self.spin_z == 0

    def components(self) -> tuple[int, int, int]:
        return (self.energy, self.momentum, self.spin_z)


ZERO_BUNDLE = QuantaBundle(0, 0, 0)


def bundle_add(p: QuantaBundle, q: QuantaBundle) -> QuantaBundle:
    """Component-wise exact sum. Raises OverflowError out of 64-bit range."""
    return QuantaBundle(
        _check_int64(p.energy + q.energy, "energy sum"),
        _check_int64(p.momentum + q.momentum, "momentum sum"),
        _check_int64(p.spin_z + q.spin_z, "spin_z sum"),
    )


def bundle_neg(p: QuantaBundle) -> QuantaBundle:
    return QuantaBundle(-p.energy, -p.momentum, -p.spin_z)


def bundle_within(offer: QuantaBundle, inventory: QuantaBundle) -> bool:
    """True when every offered component lies between zero and the inventory
    component (inclusive, sign-aware): the offer never overspends."""
    for o, inv in zip(offer.components(), inventory.components()):
        if inv >= 0 and not (0 <= o <= inv):
            return False
        if inv < 0 and not (inv <= o <= 0):
            return False
    return True


@dataclass(frozen=True)
class Emitter:
    """The source entity: supplies the transferred quantities."""

    id: str
    at: SpacetimeEvent
    source_amplitude: Amplitude
    inventory: QuantaBundle
    offer_quanta: QuantaBundle

    def __post_init__(self) -> None:
        if not bundle_within(self.offer_quanta, self.inventory):
            raise ValueError(
                f"emitter {self.id}: offer {self.offer_quanta} exceeds inventory {self.inventory}"
            )


@dataclass(frozen=True)
class Absorber:
    """A potential receiver. Efficiency 0 means it never responds."""

    id: str
    at: SpacetimeEvent
    efficiency: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.efficiency <= 1.0):
            raise ValueError(f"absorber {self.id}: efficiency {self.efficiency} not in [0, 1]")


# splitmix64 constants (Steele, Lea & Flood's mixing function).
_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U53_SCALE = 2.0**-53


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, k: int) -> int:
    """Seed for independent sub-stream k: the (k+1)-th raw output of a
    splitmix64 stream seeded with master_seed. A master seed used for
    derivation should not also be drawn from directly."""
    if k < 0:
        raise ValueError("sub-stream index must be nonnegative")
    return _mix64((master_seed + (k + 1) * _GAMMA) & _MASK64)


class RandomSource:
    """Deterministic 64-bit generator (splitmix64).

    Output i of a stream seeded with s is mix64(s + (i+1)*GAMMA) modulo 2^64,
    with GAMMA = 0x9E3779B97F4A7C15 and mix64 the standard xor-shift/multiply
    finalizer. Pure integer arithmetic: identical seeds give identical streams
    on every platform. Uniform reals take the top 53 bits, so they lie in
    [0, 1). Single-owner; derive independent sources with spawn()/derive_seed.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int) -> None:
        self.seed = seed & _MASK64
        self._state = self.seed

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def uniform(self) -> float:
        """One uniform real in [0, 1)."""
        return (self.next_u64() >> 11) * _U53_SCALE

    def uniform_block(self, n: int) -> np.ndarray:
        """n uniforms in [0, 1) as a float64 array; consumes exactly the same
        stream positions as n sequential uniform() calls."""
        idx = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self._state) + idx * np.uint64(_GAMMA)
        self._state = (self._state + n * _GAMMA) & _MASK64
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        return (z >> np.uint64(11)).astype(np.float64) * _U53_SCALE

    def next_below(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection sampling on 64-bit draws."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def spawn(self, k: int) -> "RandomSource":
        """Independent source for sub-stream k, derived from this source's
        seed (not its current position)."""
        return RandomSource(derive_seed(self.seed, k))
