"""Wave kernels between lattice events and the confirmation-echo strength.

The offer wave propagates strictly forward on the light cone (a massless
1+1-D kernel: no dispersion, no geometric spreading, so causality and
conservation checks stay exact). The confirmation wave is its conjugate
running backward. An echo's strength is the real, nonnegative weight with
which a candidate absorber answers an offer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import Absorber, Amplitude, AMP_ZERO, Emitter, SpacetimeEvent, conj, mul, norm_sq

__all__ = [
    "EvaluationSite",
    "Medium",
    "OfferWaveSample",
    "ConfirmationEcho",
    "retarded_kernel",
    "advanced_kernel",
    "offer_wave_sample",
    "echo_strength",
]


class EvaluationSite(enum.Enum):
    """Where the transition weight is evaluated: the emitter end (POST) or
    the future absorber end (PRIOR)."""

    POST = "post"
    PRIOR = "prior"


@dataclass(frozen=True)
class Medium:
    """Propagation parameters shared by both kernels.

    attenuation: per-tick magnitude factor beta in (0, 1].
    phase_rate: phase advance omega in radians per tick.
    t_violation: eta >= 0; 0 means exactly time-reversal-symmetric kernels.
        A positive eta multiplies prior-site echo strengths by
        (1 + eta)^dt, so geometries whose absorbers sit at different
        separations respond differently under the two evaluation sites.
    """

    attenuation: float = 1.0
    phase_rate: float = 0.0
    t_violation: float = 0.0
    mode: str = "light_cone"

    def __post_init__(self) -> None:
        if not (0.0 < self.attenuation <= 1.0):
            raise ValueError(f"attenuation {self.attenuation} not in (0, 1]")
        if self.t_violation < 0.0:
            raise ValueError(f"t_violation {self.t_violation} must be >= 0")
        if self.mode != "light_cone":
            raise ValueError(f"unsupported propagation mode {self.mode!r}")


@dataclass(frozen=True)
class OfferWaveSample:
    """The offer wave's value at one lattice event."""

    at: SpacetimeEvent
    value: Amplitude


@dataclass(frozen=True)
class ConfirmationEcho:
    """One absorber's answer: a real, nonnegative strength."""

    absorber_id: str
    strength: float
    site_evaluated: EvaluationSite


def _on_forward_cone(src: SpacetimeEvent, dst: SpacetimeEvent) -> int:
    """dt > 0 when dst is on src's forward light cone, else 0."""
    dt = dst.tick - src.tick
    if dt > 0 and abs(dst.site - src.site) == dt:
        return dt
    return 0


def retarded_kernel(src: SpacetimeEvent, dst: SpacetimeEvent, m: Medium) -> Amplitude:
    """Forward propagator: zero off the forward light cone; on it, magnitude
    beta^dt with phase omega*dt."""
    dt = _on_forward_cone(src, dst)
    if dt == 0:
        return AMP_ZERO
    mag = m.attenuation**dt
    phase = m.phase_rate * dt
    return Amplitude(mag * math.cos(phase), mag * math.sin(phase))


def advanced_kernel(src: SpacetimeEvent, dst: SpacetimeEvent, m: Medium) -> Amplitude:
    """Backward propagator, the conjugate of the reversed retarded kernel:
    nonzero only when dst precedes src on the backward light cone."""
    return conj(retarded_kernel(dst, src, m))


def offer_wave_sample(e: Emitter, at: SpacetimeEvent, m: Medium) -> OfferWaveSample:
    """Offer-wave value at a lattice event: source amplitude times the
    retarded kernel (zero outside the emitter's forward cone)."""
    return OfferWaveSample(at=at, value=mul(e.source_amplitude, retarded_kernel(e.at, at, m)))


def echo_strength(e: Emitter, a: Absorber, m: Medium, site: EvaluationSite) -> ConfirmationEcho:
    """Echo strength the emitter receives back from one candidate absorber.

    The post-site strength is |psi at the absorber|^2 times the absorber's
    efficiency. The prior-site strength compounds the time-reversal-violation
    factor (1 + eta) once per tick of separation; with eta = 0 the two sites
    agree exactly. Always 0 unless the absorber is strictly later than the
    emitter and on its light cone.
    """
    psi = offer_wave_sample(e, a.at, m).value
    strength = norm_sq(psi) * a.efficiency
    if site is EvaluationSite.PRIOR and strength > 0.0:
        dt = a.at.tick - e.at.tick
        strength *= (1.0 + m.t_violation) ** dt
    return ConfirmationEcho(absorber_id=a.id, strength=strength, site_evaluated=site)
