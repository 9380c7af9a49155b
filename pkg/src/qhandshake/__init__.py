"""qhandshake: a deterministic, seedable simulator of transactional
quantum-event handshakes on a 1+1-D lattice, with exact conservation
accounting and companion statistical experiments."""

__version__ = "0.1.0"

from .core import (
    Absorber,
    Amplitude,
    Emitter,
    QuantaBundle,
    RandomSource,
    SpacetimeEvent,
    derive_seed,
)
from .handshake import Transaction, TxPhase, run_event
from .ledger import Ledger, audit, post_transaction
from .propagation import EvaluationSite, Medium

__all__ = [
    "__version__",
    "Absorber",
    "Amplitude",
    "Emitter",
    "QuantaBundle",
    "RandomSource",
    "SpacetimeEvent",
    "derive_seed",
    "Transaction",
    "TxPhase",
    "run_event",
    "Ledger",
    "audit",
    "post_transaction",
    "EvaluationSite",
    "Medium",
]
