"""Double-entry conservation accounting for completed transactions.

Every completed transaction posts exactly one debit at the emitter and one
credit at the absorber per nonzero conserved component, with equal and
opposite integer amounts, so every per-transaction and global sum is exactly
zero. Entries are append-only; a transaction id can be posted once and only
once. The ledger observes transactions, it never influences them.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .core import QuantaBundle
from .handshake import Transaction, TxPhase

__all__ = [
    "Quantity",
    "LedgerEntry",
    "Ledger",
    "AuditReport",
    "DoubleSpendError",
    "IllegalPostError",
    "post_transaction",
    "audit",
    "merge_ledgers",
]


class DoubleSpendError(Exception):
    """A transaction id was posted more than once."""


class IllegalPostError(Exception):
    """Attempt to post a transaction that is not completed."""


class Quantity(enum.Enum):
    ENERGY = "energy"
    MOMENTUM = "momentum"
    SPIN_Z = "spin_z"


def _bundle_items(q: QuantaBundle) -> list[tuple[Quantity, int]]:
    return [
        (Quantity.ENERGY, q.energy),
        (Quantity.MOMENTUM, q.momentum),
        (Quantity.SPIN_Z, q.spin_z),
    ]


@dataclass(frozen=True)
class LedgerEntry:
    tx_id: str
    party_id: str
    quantity: Quantity
    amount: int
    tick: int

    def __post_init__(self) -> None:
        if self.amount == 0:
            raise ValueError("ledger entries must carry a nonzero amount")


@dataclass
class Ledger:
    """Append-only sequence of entries plus the posted-transaction set."""

    entries: list[LedgerEntry] = field(default_factory=list)
    posted: set[str] = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.entries)

    def balance(self, party_id: str, quantity: Quantity) -> int:
        return sum(
            e.amount for e in self.entries if e.party_id == party_id and e.quantity == quantity
        )

    def to_csv_rows(self) -> list[tuple[str, str, str, int, int]]:
        return [(e.tx_id, e.party_id, e.quantity.value, e.amount, e.tick) for e in self.entries]


def post_transaction(tx: Transaction, ledger: Ledger) -> Ledger:
    """Post one completed transaction: a debit at the emitter and a credit at
    the absorber for each nonzero conserved component. Exactly-once per
    transaction id."""
    if tx.phase is not TxPhase.COMPLETED:
        raise IllegalPostError(f"transaction {tx.tx_id} is {tx.phase}, not completed")
    if tx.tx_id in ledger.posted:
        raise DoubleSpendError(f"transaction {tx.tx_id} already posted")
    assert tx.chosen is not None and tx.absorption_event is not None
    for quantity, amount in _bundle_items(tx.quanta):
        if amount == 0:
            continue
        ledger.entries.append(
            LedgerEntry(tx.tx_id, tx.emitter_id, quantity, -amount, tx.emission_event.tick)
        )
        ledger.entries.append(
            LedgerEntry(tx.tx_id, tx.chosen, quantity, amount, tx.absorption_event.tick)
        )
    ledger.posted.add(tx.tx_id)
    return ledger


@dataclass(frozen=True)
class AuditReport:
    global_sums: dict[str, int]
    per_tx_sums_zero: bool
    pair_rule_ok: bool
    n_parties: int
    n_transactions: int
    violations: tuple[str, ...]
    passed: bool

    def to_json(self) -> str:
        payload = {
            "global_sums": self.global_sums,
            "per_tx_sums_zero": self.per_tx_sums_zero,
            "pair_rule_ok": self.pair_rule_ok,
            "n_parties": self.n_parties,
            "n_transactions": self.n_transactions,
            "violations": list(self.violations),
            "passed": self.passed,
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def audit(ledger: Ledger) -> AuditReport:
    """Check global and per-transaction conservation; read-only, and
    violations are reported rather than raised."""
    violations: list[str] = []
    global_sums = {q.value: 0 for q in Quantity}
    per_tx: dict[tuple[str, Quantity], list[int]] = {}
    parties: set[str] = set()

    for e in ledger.entries:
        global_sums[e.quantity.value] += e.amount
        per_tx.setdefault((e.tx_id, e.quantity), []).append(e.amount)
        parties.add(e.party_id)

    for quantity_name, total in global_sums.items():
        if total != 0:
            violations.append(f"global {quantity_name} sum is {total}, expected 0")

    per_tx_sums_zero = True
    pair_rule_ok = True
    for (tx_id, quantity), amounts in per_tx.items():
        if sum(amounts) != 0:
            per_tx_sums_zero = False
            violations.append(f"tx {tx_id} {quantity.value} sums to {sum(amounts)}")
        if len(amounts) != 2 or min(amounts) >= 0 or max(amounts) <= 0:
            pair_rule_ok = False
            violations.append(f"tx {tx_id} {quantity.value} is not one debit + one credit")

    return AuditReport(
        global_sums=global_sums,
        per_tx_sums_zero=per_tx_sums_zero,
        pair_rule_ok=pair_rule_ok,
        n_parties=len(parties),
        n_transactions=len(ledger.posted),
        violations=tuple(violations),
        passed=not violations,
    )


def merge_ledgers(parts: list[Ledger], prefixes: list[str]) -> Ledger:
    """Concatenate per-trial ledgers, namespacing transaction ids so the
    merged ledger keeps the exactly-once rule."""
    if len(parts) != len(prefixes):
        raise ValueError("one prefix per ledger required")
    merged = Ledger()
    for part, prefix in zip(parts, prefixes):
        for e in part.entries:
            merged.entries.append(
                LedgerEntry(f"{prefix}/{e.tx_id}", e.party_id, e.quantity, e.amount, e.tick)
            )
        for tx_id in part.posted:
            namespaced = f"{prefix}/{tx_id}"
            if namespaced in merged.posted:
                raise DoubleSpendError(f"merge collision on {namespaced}")
            merged.posted.add(namespaced)
    return merged
