"""Tracks which lattice cells have been fixed by completed transactions and
measures the roughness of the boundary between committed past and open
future.

The tracker is a pure observer: it is fed completed transactions in commit
order and never influences them. A committed cell never reverts. Because a
handshake spans its whole emitter-absorber light-cone path, commitment
arrives in diagonal strokes, and the resulting frontier is a ragged
interface rather than a flat line. Box counts of that interface stop at one
lattice cell: the measurement floor is the lattice itself, so nothing is
extrapolated below scale 1.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass, field

from .core import SpacetimeEvent
from .handshake import Transaction, TxPhase

__all__ = [
    "CellState",
    "CommitmentMap",
    "FrontierProfile",
    "RoughnessReport",
    "ConflictError",
    "on_cone_path",
    "apply_transaction",
    "frontier_profile",
    "roughness",
    "scale_profile",
    "boundary_cells",
]


class ConflictError(Exception):
    """Two transactions tried to commit the same cell."""


class CellState(enum.Enum):
    OPEN = "open"
    PENDING = "pending"
    COMMITTED = "committed"


def on_cone_path(src: SpacetimeEvent, dst: SpacetimeEvent) -> list[tuple[int, int]]:
    """Cells along the light-cone diagonal from src to dst, inclusive."""
    dt = dst.tick - src.tick
    dx = dst.site - src.site
    if dt <= 0 or abs(dx) != dt:
        raise ValueError(f"{src} -> {dst} is not a forward light-cone path")
    step = 1 if dx > 0 else -1
    return [(src.site + k * step, src.tick + k) for k in range(dt + 1)]


@dataclass
class CommitmentMap:
    """Grid of cell states over sites 0..n_sites-1 and ticks 0..n_ticks-1."""

    n_sites: int
    n_ticks: int
    committed: dict[tuple[int, int], int] = field(default_factory=dict)
    pending: set[tuple[int, int]] = field(default_factory=set)
    next_commit_order: int = 0

    def __post_init__(self) -> None:
        if self.n_sites < 1 or self.n_ticks < 1:
            raise ValueError("grid must have at least one site and one tick")

    def in_bounds(self, site: int, tick: int) -> bool:
        return 0 <= site < self.n_sites and 0 <= tick < self.n_ticks

    def state_of(self, site: int, tick: int) -> CellState:
        if (site, tick) in self.committed:
            return CellState.COMMITTED
        if (site, tick) in self.pending:
            return CellState.PENDING
        return CellState.OPEN

    def mark_pending(self, src: SpacetimeEvent, dst: SpacetimeEvent) -> None:
        """Flag an in-flight handshake's light-cone span."""
        for cell in on_cone_path(src, dst):
            if cell not in self.committed:
                self.pending.add(cell)

    def to_csv_rows(self) -> list[tuple[int, int, str, int]]:
        rows = []
        for site in range(self.n_sites):
            for tick in range(self.n_ticks):
                order = self.committed.get((site, tick), -1)
                rows.append((site, tick, self.state_of(site, tick).value, order))
        return rows


@dataclass(frozen=True)
class FrontierProfile:
    """Per-site frontier height: the greatest tick up to which the site's
    cells are contiguously committed from tick 0 (-1 when the tick-0 cell
    itself is uncommitted)."""

    heights: tuple[int, ...]


@dataclass(frozen=True)
class RoughnessReport:
    width: float
    finger_max: float


def apply_transaction(cmap: CommitmentMap, tx: Transaction) -> CommitmentMap:
    """Commit a completed transaction's emitter cell, absorber cell, and the
    light-cone path between them, all stamped with one commit order. An
    aborted transaction leaves the map unchanged. Pending marks are cleared
    once the handshake resolves."""
    if tx.phase is TxPhase.ABORTED:
        return cmap
    if tx.phase is not TxPhase.COMPLETED:
        raise ValueError(f"cannot apply a transaction in phase {tx.phase}")
    assert tx.absorption_event is not None
    path = on_cone_path(tx.emission_event, tx.absorption_event)
    for cell in path:
        if cell in cmap.committed:
            raise ConflictError(f"cell {cell} already committed")
        if not cmap.in_bounds(*cell):
            raise ValueError(f"cell {cell} outside the {cmap.n_sites}x{cmap.n_ticks} grid")
    order = cmap.next_commit_order
    for cell in path:
        cmap.committed[cell] = order
        cmap.pending.discard(cell)
    cmap.next_commit_order = order + 1
    return cmap


def frontier_profile(cmap: CommitmentMap) -> FrontierProfile:
    heights = []
    for site in range(cmap.n_sites):
        h = -1
        for tick in range(cmap.n_ticks):
            if (site, tick) not in cmap.committed:
                break
            h = tick
        heights.append(h)
    return FrontierProfile(heights=tuple(heights))


def roughness(profile: FrontierProfile) -> RoughnessReport:
    """Interface width (population standard deviation of the heights) and
    the longest finger (max height minus median height)."""
    h = profile.heights
    if any(v < 0 for v in h):
        raise ValueError("roughness requires every site to have a committed base")
    mean = sum(h) / len(h)
    width = (sum((v - mean) ** 2 for v in h) / len(h)) ** 0.5
    finger_max = max(h) - statistics.median(h)
    return RoughnessReport(width=width, finger_max=float(finger_max))


def boundary_cells(cmap: CommitmentMap) -> set[tuple[int, int]]:
    """Committed cells adjacent to a not-committed cell.

    Virtual cells above the grid top count as open (the future is open);
    virtual cells below tick 0 or beyond the side edges count as committed,
    so grid edges are not interfaces.
    """
    cells = set()
    for (site, tick) in cmap.committed:
        for ds, dt in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ns, nt = site + ds, tick + dt
            if nt < 0 or ns < 0 or ns >= cmap.n_sites:
                continue
            if nt >= cmap.n_ticks or (ns, nt) not in cmap.committed:
                cells.add((site, tick))
                break
    return cells


def scale_profile(cmap: CommitmentMap, scales: list[int]) -> dict[int, int]:
    """Box-count the committed/open interface: for each scale s, the number
    of s-by-s boxes (anchored at the origin) containing a boundary cell.
    Scales must be powers of two >= 1 within the grid; the table never
    reports below scale 1, the lattice floor."""
    size = max(cmap.n_sites, cmap.n_ticks)
    for s in scales:
        if s < 1 or (s & (s - 1)) != 0:
            raise ValueError(f"scale {s} is not a power of two >= 1")
        if s > size:
            raise ValueError(f"scale {s} exceeds the grid size {size}")
    boundary = boundary_cells(cmap)
    counts = {}
    for s in scales:
        boxes = {(site // s, tick // s) for site, tick in boundary}
        counts[s] = len(boxes)
    return counts
