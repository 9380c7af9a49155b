"""The four-stage quantum-event protocol: offer, confirmation responses,
stochastic choice among echoes, and reinforcement to completion.

A transaction is driven through a strict state machine
(OFFERED -> CONFIRMED -> SELECTED -> REINFORCING -> COMPLETED, with aborts
allowed only from OFFERED/CONFIRMED) and never revisits a state. The chosen
absorber is always strictly later in tick than the emitter, so no completed
transaction ever moves quantities toward the past. Reinforcement consumes
zero simulated time: both endpoints see the handshake resolve at their own
tick.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import (
    Absorber,
    Emitter,
    QuantaBundle,
    RandomSource,
    SpacetimeEvent,
    ZERO_BUNDLE,
    derive_seed,
)
from .propagation import EvaluationSite, Medium, echo_strength

__all__ = [
    "TxPhase",
    "LEGAL_TRANSITIONS",
    "EchoTable",
    "Transaction",
    "NoAbsorberError",
    "TransitionError",
    "collect_confirmations",
    "stochastic_choice",
    "reinforce_to_completion",
    "run_event",
    "SiteComparison",
    "compare_sites",
]


class NoAbsorberError(Exception):
    """Raised when a choice is requested from an empty echo table."""


class TransitionError(Exception):
    """Raised on an illegal transaction state transition."""


class TxPhase(enum.Enum):
    OFFERED = "offered"
    CONFIRMED = "confirmed"
    SELECTED = "selected"
    REINFORCING = "reinforcing"
    COMPLETED = "completed"
    ABORTED = "aborted"


LEGAL_TRANSITIONS: frozenset[tuple[TxPhase, TxPhase]] = frozenset(
    {
        (TxPhase.OFFERED, TxPhase.CONFIRMED),
        (TxPhase.CONFIRMED, TxPhase.SELECTED),
        (TxPhase.SELECTED, TxPhase.REINFORCING),
        (TxPhase.REINFORCING, TxPhase.COMPLETED),
        (TxPhase.OFFERED, TxPhase.ABORTED),
        (TxPhase.CONFIRMED, TxPhase.ABORTED),
    }
)


@dataclass(frozen=True)
class EchoTable:
    """Strictly positive echo strengths keyed by absorber id, stored in
    ascending id order so downstream sampling is reproducible."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        ids = [absorber_id for absorber_id, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate absorber id in echo table")
        if ids != sorted(ids):
            raise ValueError("echo table must be ordered by ascending absorber id")
        for absorber_id, strength in self.entries:
            if not strength > 0.0:
                raise ValueError(f"echo strength for {absorber_id} must be > 0, got {strength}")

    def __len__(self) -> int:
        return len(self.entries)

    def total(self) -> float:
        return sum(strength for _, strength in self.entries)

    def strength_of(self, absorber_id: str) -> float:
        for aid, strength in self.entries:
            if aid == absorber_id:
                return strength
        raise KeyError(absorber_id)


@dataclass
class Transaction:
    """One handshake record, mutated only through its legal transitions."""

    tx_id: str
    emitter_id: str
    emission_event: SpacetimeEvent
    evaluation_site: EvaluationSite
    quanta: QuantaBundle = ZERO_BUNDLE
    echoes: EchoTable | None = None
    chosen: str | None = None
    absorption_event: SpacetimeEvent | None = None
    rounds: int = 0
    dominance: float = 0.0
    phase: TxPhase = TxPhase.OFFERED
    abort_reason: str | None = None
    phase_history: list[TxPhase] = field(default_factory=lambda: [TxPhase.OFFERED])

    def _advance(self, new_phase: TxPhase) -> None:
        if (self.phase, new_phase) not in LEGAL_TRANSITIONS:
            raise TransitionError(f"illegal transition {self.phase} -> {new_phase}")
        self.phase = new_phase
        self.phase_history.append(new_phase)

    @property
    def completed(self) -> bool:
        return self.phase is TxPhase.COMPLETED

    @property
    def aborted(self) -> bool:
        return self.phase is TxPhase.ABORTED


def collect_confirmations(
    e: Emitter,
    absorbers: list[Absorber],
    m: Medium,
    site: EvaluationSite,
) -> EchoTable:
    """Gather the positive echoes from every candidate absorber, ordered by
    id. An empty table is a legal result (vacuum)."""
    ids = [a.id for a in absorbers]
    if len(set(ids)) != len(ids):
        raise ValueError("absorber ids must be unique")
    entries = []
    for a in sorted(absorbers, key=lambda a: a.id):
        echo = echo_strength(e, a, m, site)
        if echo.strength > 0.0:
            entries.append((a.id, echo.strength))
    return EchoTable(entries=tuple(entries))


def stochastic_choice(table: EchoTable, rng: RandomSource) -> str:
    """Pick one absorber with probability proportional to its echo strength:
    a single uniform draw, inverse-CDF over the table's fixed id order."""
    if len(table) == 0:
        raise NoAbsorberError("cannot choose from an empty echo table")
    total = table.total()
    threshold = rng.uniform() * total
    cumulative = 0.0
    for absorber_id, strength in table.entries:
        cumulative += strength
        if cumulative > threshold:
            return absorber_id
    # Only reachable through rounding at the top of the CDF.
    return table.entries[-1][0]


def reinforce_to_completion(tx: Transaction, r: float, eps: float) -> Transaction:
    """Repeat the selected handshake, multiplying its weight by r each round,
    until it holds at least a 1 - eps share of the total. The simulation
    clock does not advance: completion is atemporal at both endpoints."""
    if not r > 1.0:
        raise ValueError(f"reinforcement factor r must be > 1, got {r}")
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if tx.phase is not TxPhase.SELECTED:
        raise TransitionError(f"reinforcement requires a SELECTED transaction, got {tx.phase}")
    assert tx.echoes is not None and tx.chosen is not None
    w_sel = tx.echoes.strength_of(tx.chosen)
    rest = tx.echoes.total() - w_sel

    tx._advance(TxPhase.REINFORCING)
    target = 1.0 - eps
    rounds = 0
    while True:
        rounds += 1
        w_sel *= r
        dominance = 1.0 / (1.0 + rest / w_sel)  # robust to w_sel overflow
        if dominance >= target:
            break
    tx.rounds = rounds
    tx.dominance = dominance
    tx._advance(TxPhase.COMPLETED)
    return tx


def run_event(
    e: Emitter,
    absorbers: list[Absorber],
    m: Medium,
    site: EvaluationSite,
    rng: RandomSource,
    r: float = 2.0,
    eps: float = 1e-3,
    tx_id: str | None = None,
) -> Transaction:
    """Drive one potential quantum event through the full pipeline.

    With no responding absorber the offer aborts and nothing is transferred;
    ABORTED is a value, not an error.
    """
    tx = Transaction(
        tx_id=tx_id if tx_id is not None else f"tx-{e.id}",
        emitter_id=e.id,
        emission_event=e.at,
        evaluation_site=site,
        quanta=e.offer_quanta,
    )
    table = collect_confirmations(e, absorbers, m, site)
    if len(table) == 0:
        tx.abort_reason = "no_absorber"
        tx._advance(TxPhase.ABORTED)
        return tx
    tx.echoes = table
    tx._advance(TxPhase.CONFIRMED)

    tx.chosen = stochastic_choice(table, rng)
    by_id = {a.id: a for a in absorbers}
    tx.absorption_event = by_id[tx.chosen].at
    tx._advance(TxPhase.SELECTED)

    return reinforce_to_completion(tx, r=r, eps=eps)


@dataclass(frozen=True)
class SiteComparison:
    """Empirical post-vs-prior selection frequencies for one geometry,
    their total-variation distance, and the analytic expectation computed
    from the echo formula before any trial ran."""

    absorber_ids: tuple[str, ...]
    freq_post: dict[str, float]
    freq_prior: dict[str, float]
    analytic_post: dict[str, float]
    analytic_prior: dict[str, float]
    tv_distance: float
    analytic_tv: float
    sigma_bound: float
    trials: int


def _tv(p: dict[str, float], q: dict[str, float], ids: tuple[str, ...]) -> float:
    return 0.5 * sum(abs(p[i] - q[i]) for i in ids)


def _normalized_weights(
    e: Emitter, absorbers: list[Absorber], m: Medium, site: EvaluationSite
) -> dict[str, float]:
    table = collect_confirmations(e, absorbers, m, site)
    total = table.total()
    weights = {aid: 0.0 for aid in sorted(a.id for a in absorbers)}
    for aid, strength in table.entries:
        weights[aid] = strength / total
    return weights


def compare_sites(
    e: Emitter,
    absorbers: list[Absorber],
    m: Medium,
    trials: int,
    master_seed: int,
    r: float = 2.0,
    eps: float = 1e-3,
) -> SiteComparison:
    """Run the same geometry under post and prior evaluation with independent
    trial streams and report how far the two selection distributions drift.

    The 3-sigma bound is the null-hypothesis scale of the empirical TV
    distance when both sites share one underlying distribution.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ids = tuple(sorted(a.id for a in absorbers))
    counts = {
        EvaluationSite.POST: {aid: 0 for aid in ids},
        EvaluationSite.PRIOR: {aid: 0 for aid in ids},
    }
    arm_seed = {
        EvaluationSite.POST: derive_seed(master_seed, 0),
        EvaluationSite.PRIOR: derive_seed(master_seed, 1),
    }
    for site in (EvaluationSite.POST, EvaluationSite.PRIOR):
        arm = RandomSource(arm_seed[site])
        for k in range(trials):
            tx = run_event(e, absorbers, m, site, arm.spawn(k), r=r, eps=eps, tx_id=f"{site.value}-{k}")
            if not tx.completed:
                raise NoAbsorberError("compare_sites requires a geometry with at least one echo")
            counts[site][tx.chosen] += 1

    freq_post = {aid: counts[EvaluationSite.POST][aid] / trials for aid in ids}
    freq_prior = {aid: counts[EvaluationSite.PRIOR][aid] / trials for aid in ids}
    analytic_post = _normalized_weights(e, absorbers, m, EvaluationSite.POST)
    analytic_prior = _normalized_weights(e, absorbers, m, EvaluationSite.PRIOR)

    pooled = {aid: 0.5 * (freq_post[aid] + freq_prior[aid]) for aid in ids}
    sigma_bound = 3.0 * 0.5 * sum(
        (pooled[aid] * (1.0 - pooled[aid]) * (2.0 / trials)) ** 0.5 for aid in ids
    )
    return SiteComparison(
        absorber_ids=ids,
        freq_post=freq_post,
        freq_prior=freq_prior,
        analytic_post=analytic_post,
        analytic_prior=analytic_prior,
        tv_distance=_tv(freq_post, freq_prior, ids),
        analytic_tv=_tv(analytic_post, analytic_prior, ids),
        sigma_bound=sigma_bound,
        trials=trials,
    )
