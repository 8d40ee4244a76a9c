"""Time-expanded reconfiguration graphs, one per satellite.

Each satellite owns a fixed lattice of candidate orbits anchored on its
initial slot. Stage-``s`` vertices are that lattice propagated to ``t_s``;
because every lattice orbit shares one altitude, relative phases never drift
and the edge costs between adjacent stages are the same matrix at every
stage. Vertex ``j`` at stage ``s - 1`` and vertex ``j`` at stage ``s`` are the
same orbit, so the stay edge is the diagonal.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .astro import OrbitalSlot, TimeGrid
from .errors import GridRangeError, InvalidInputError
from .maneuver import SlotGrid, SlotGridSpec, cost_matrix, generate_slot_grid


@dataclass(frozen=True, eq=False)
class ReconfigurationGraph:
    """K layered graphs sharing one time grid.

    Attributes:
        costs: ``(K, J, J)`` transfer costs in km/s; ``costs[k, i, j]`` prices
            the edge from slot ``i`` to slot ``j`` between any two adjacent
            stages. The diagonal is zero.
        initial_slots: Stage-0 singleton of each satellite; it coincides with
            slot 0 of the satellite's lattice.
        slot_grids: Per-satellite lattice referenced to the mission epoch, or
            ``None`` for synthetic graphs built from a cost matrix alone.
        grid: Mission time grid.
    """

    costs: np.ndarray
    initial_slots: tuple[OrbitalSlot | None, ...]
    slot_grids: tuple[SlotGrid | None, ...]
    grid: TimeGrid

    def __post_init__(self):
        c = np.array(self.costs, dtype=float)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise InvalidInputError(f"cost tensor must be (K, J, J), got {c.shape}")
        if np.any(np.isnan(c)) or np.any(c < 0):
            raise InvalidInputError("edge costs must be non-negative")
        if np.any(np.diagonal(c, axis1=1, axis2=2) != 0):
            raise InvalidInputError("stay edges must cost exactly zero")
        if len(self.initial_slots) != c.shape[0] or len(self.slot_grids) != c.shape[0]:
            raise InvalidInputError("one initial slot and lattice per satellite expected")
        c.setflags(write=False)
        object.__setattr__(self, "costs", c)

    @classmethod
    def synthetic(cls, costs, grid: TimeGrid) -> "ReconfigurationGraph":
        """Graph defined only by its cost tensor; handy for fixtures."""
        costs = np.asarray(costs, dtype=float)
        K = costs.shape[0]
        return cls(costs, (None,) * K, (None,) * K, grid)

    @property
    def satellites(self) -> int:
        return self.costs.shape[0]

    @property
    def slots(self) -> int:
        return self.costs.shape[1]

    @property
    def stages(self) -> int:
        return self.grid.stage_count

    def _check(self, s: int, k: int):
        if not 0 <= s <= self.stages:
            raise GridRangeError(f"stage {s} outside 0..{self.stages}")
        if not 0 <= k < self.satellites:
            raise GridRangeError(f"satellite {k} outside 0..{self.satellites - 1}")

    def vertex_count(self, s: int) -> int:
        return 1 if s == 0 else self.slots

    def vertices(self, s: int, k: int) -> list[OrbitalSlot]:
        """Slots of satellite ``k`` at stage ``s``, referenced to ``t_s``."""
        self._check(s, k)
        if s == 0:
            return [self.initial_slots[k]]
        lattice = self.slot_grids[k]
        if lattice is None:
            raise InvalidInputError("synthetic graphs carry no orbital slots")
        return list(lattice.advanced(self.grid.stage_starts[s - 1], self.grid).slots)

    def edge_costs(self, s: int, k: int) -> np.ndarray:
        """Cost matrix of edges from stage ``s - 1`` to stage ``s`` (s >= 1)."""
        self._check(s, k)
        if s == 0:
            raise GridRangeError("stage 0 has no incoming edges")
        return self.costs[k, :1] if s == 1 else self.costs[k]

    def cost(self, s: int, k: int, i: int, j: int) -> float:
        return float(self.edge_costs(s, k)[i, j])


def build_graph(
    initial_slots: Sequence[OrbitalSlot],
    grid: TimeGrid,
    spec: SlotGridSpec,
    budgets: Sequence[float],
    workers: int = 1,
) -> ReconfigurationGraph:
    """Lattices and transfer costs for every satellite.

    Plane offsets are sized from each satellite's initial budget. Cost
    matrices are priced with ``transfer_cost`` so any edge can be re-priced
    bit-for-bit.
    """
    if len(initial_slots) != len(budgets):
        raise InvalidInputError("one budget per satellite expected")
    for k, b in enumerate(budgets):
        if math.isnan(b) or not b > 0:
            raise InvalidInputError(f"budget of satellite {k} must be positive, got {b}")
    for slot in initial_slots:
        if slot.ref_time != 1:
            raise InvalidInputError("initial slots must be referenced to the epoch (step 1)")
    lattices = [generate_slot_grid(slot, spec, b) for slot, b in zip(initial_slots, budgets)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mats = list(pool.map(cost_matrix, lattices))
    else:
        mats = [cost_matrix(lat) for lat in lattices]
    costs = np.stack(mats) if mats else np.zeros((0, spec.size, spec.size))
    return ReconfigurationGraph(costs, tuple(initial_slots), tuple(lattices), grid)


def feasible_edges(
    graph: ReconfigurationGraph, k: int, budget: float, s: int | None = None
) -> list[tuple[int, int, float]]:
    """Edges ``(i, j, cost)`` whose cost fits ``budget``; stays are always included.

    With ``s`` given, only edges into stage ``s`` are considered; otherwise the
    stage-independent lattice matrix is used.
    """
    costs = graph.costs[k] if s is None else graph.edge_costs(s, k)
    out = []
    for i in range(costs.shape[0]):
        for j in range(costs.shape[1]):
            c = float(costs[i, j])
            if i == j or c <= budget:
                out.append((i, j, c))
    return out
