"""Tests for double-entry conservation accounting."""

import json

import pytest

from qhandshake.core import (
    Absorber,
    Amplitude,
    Emitter,
    QuantaBundle,
    RandomSource,
    SpacetimeEvent,
    derive_seed,
)
from qhandshake.handshake import run_event
from qhandshake.ledger import (
    DoubleSpendError,
    IllegalPostError,
    Ledger,
    LedgerEntry,
    Quantity,
    audit,
    merge_ledgers,
    post_transaction,
)
from qhandshake.propagation import EvaluationSite, Medium

UNIT = Medium()
POST = EvaluationSite.POST


def emitter(energy=1, momentum=0, spin=0):
    q = QuantaBundle(energy, momentum, spin)
    return Emitter("e0", SpacetimeEvent(0, 0), Amplitude(1.0), q, q)


def completed_tx(energy=1, momentum=0, spin=0, tx_id="t0", seed=5):
    tx = run_event(
        emitter(energy, momentum, spin),
        [Absorber("a1", SpacetimeEvent(3, 3))],
        UNIT,
        POST,
        RandomSource(seed),
        tx_id=tx_id,
    )
    assert tx.completed
    return tx


class TestPostTransaction:
    def test_debit_credit_pair(self):
        ledger = post_transaction(completed_tx(energy=3), Ledger())
        assert len(ledger) == 2
        debit, credit = ledger.entries
        assert (debit.party_id, debit.quantity, debit.amount, debit.tick) == (
            "e0", Quantity.ENERGY, -3, 0,
        )
        assert (credit.party_id, credit.quantity, credit.amount, credit.tick) == (
            "a1", Quantity.ENERGY, 3, 3,
        )

    def test_zero_bundle_appends_nothing(self):
        ledger = post_transaction(completed_tx(energy=0), Ledger())
        assert len(ledger) == 0
        assert "t0" in ledger.posted  # still marked, still exactly-once

    def test_multi_component_pairs(self):
        ledger = post_transaction(completed_tx(energy=2, momentum=-1, spin=1), Ledger())
        assert len(ledger) == 6
        kinds = [e.quantity for e in ledger.entries]
        assert kinds.count(Quantity.ENERGY) == 2
        assert kinds.count(Quantity.MOMENTUM) == 2
        assert kinds.count(Quantity.SPIN_Z) == 2

    def test_double_post_raises(self):
        tx = completed_tx()
        ledger = post_transaction(tx, Ledger())
        with pytest.raises(DoubleSpendError):
            post_transaction(tx, ledger)

    def test_incomplete_tx_rejected(self):
        tx = run_event(emitter(), [], UNIT, POST, RandomSource(1))
        assert tx.aborted
        with pytest.raises(IllegalPostError):
            post_transaction(tx, Ledger())

    def test_entries_must_be_nonzero(self):
        with pytest.raises(ValueError):
            LedgerEntry("t", "p", Quantity.ENERGY, 0, 0)


class TestAudit:
    def test_empty_ledger_passes(self):
        report = audit(Ledger())
        assert report.passed
        assert report.global_sums == {"energy": 0, "momentum": 0, "spin_z": 0}

    def test_single_valid_pair_passes(self):
        report = audit(post_transaction(completed_tx(energy=5), Ledger()))
        assert report.passed
        assert report.n_parties == 2
        assert report.n_transactions == 1

    def test_violations_reported_not_raised(self):
        ledger = Ledger()
        ledger.entries.append(LedgerEntry("bad", "p1", Quantity.ENERGY, 4, 0))
        report = audit(ledger)
        assert not report.passed
        assert any("bad" in v for v in report.violations)
        assert report.global_sums["energy"] == 4

    def test_audit_never_mutates(self):
        ledger = post_transaction(completed_tx(), Ledger())
        before = list(ledger.entries)
        audit(ledger)
        assert ledger.entries == before

    def test_json_round_trip(self):
        report = audit(post_transaction(completed_tx(), Ledger()))
        payload = json.loads(report.to_json())
        assert payload["passed"] is True
        assert payload["global_sums"]["energy"] == 0


class TestEndToEnd:
    def _seeded_run(self, n_transactions, with_ledger):
        absorbers = [
            Absorber("a1", SpacetimeEvent(1, 1), efficiency=0.3),
            Absorber("a2", SpacetimeEvent(-2, 2), efficiency=0.8),
        ]
        ledger = Ledger()
        log = []
        for k in range(n_transactions):
            tx = run_event(
                emitter(energy=2, momentum=1, spin=-1),
                absorbers,
                UNIT,
                POST,
                RandomSource(derive_seed(909, k)),
                tx_id=f"t{k}",
            )
            if with_ledger:
                post_transaction(tx, ledger)
            log.append((k, tx.chosen, tx.rounds))
        return ledger, log

    def test_thousand_transactions_conserve_exactly(self):
        ledger, _ = self._seeded_run(1000, with_ledger=True)
        report = audit(ledger)
        assert report.passed
        assert report.global_sums == {"energy": 0, "momentum": 0, "spin_z": 0}
        assert report.n_transactions == 1000

    def test_ledger_neutrality(self):
        # auditing on vs off cannot change which absorbers get chosen
        _, log_with = self._seeded_run(300, with_ledger=True)
        _, log_without = self._seeded_run(300, with_ledger=False)
        assert log_with == log_without

    def test_replay_fuzz_always_double_spends(self):
        ledger, _ = self._seeded_run(50, with_ledger=True)
        rng = RandomSource(31)
        for _ in range(50):
            k = rng.next_below(50)
            tx = run_event(
                emitter(energy=2, momentum=1, spin=-1),
                [Absorber("a1", SpacetimeEvent(1, 1))],
                UNIT,
                POST,
                RandomSource(derive_seed(909, k)),
                tx_id=f"t{k}",
            )
            with pytest.raises(DoubleSpendError):
                post_transaction(tx, ledger)


class TestExportAndMerge:
    def test_csv_rows_shape(self):
        ledger = post_transaction(completed_tx(energy=2), Ledger())
        rows = ledger.to_csv_rows()
        assert rows == [("t0", "e0", "energy", -2, 0), ("t0", "a1", "energy", 2, 3)]

    def test_merge_namespaces_tx_ids(self):
        a = post_transaction(completed_tx(tx_id="t0", seed=1), Ledger())
        b = post_transaction(completed_tx(tx_id="t0", seed=2), Ledger())
        merged = merge_ledgers([a, b], ["w0", "w1"])
        assert audit(merged).passed
        assert {e.tx_id for e in merged.entries} == {"w0/t0", "w1/t0"}

    def test_merge_rejects_prefix_collision(self):
        a = post_transaction(completed_tx(tx_id="t0"), Ledger())
        with pytest.raises(DoubleSpendError):
            merge_ledgers([a, a], ["w0", "w0"])

    def test_merge_requires_matching_prefixes(self):
        with pytest.raises(ValueError):
            merge_ledgers([Ledger()], [])

    def test_balance(self):
        ledger = post_transaction(completed_tx(energy=4), Ledger())
        assert ledger.balance("e0", Quantity.ENERGY) == -4
        assert ledger.balance("a1", Quantity.ENERGY) == 4
        assert ledger.balance("a1", Quantity.SPIN_Z) == 0
