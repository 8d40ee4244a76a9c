"""Problem instances and plan evaluation.

A plan assigns one slot index to every (stage, satellite) pair. Paths are
contiguous by construction: the edge used at stage ``s`` runs from the slot
held at ``s - 1`` (slot 0 before stage 1) to the slot held at ``s``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .astro import EARTH, OrbitalSlot, TimeGrid
from .errors import InvalidInputError, InvalidPlanError
from .maneuver import SlotGridSpec
from .teg import ReconfigurationGraph, build_graph
from .visibility import GroundTarget, VisibilityTensor, compute_visibility

BUDGET_TOL = 1e-9
OBJECTIVE_RTOL = 1e-9


def objective_close(a: float, b: float) -> bool:
    """Objective equality up to summation round-off."""
    return abs(a - b) <= OBJECTIVE_RTOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True, eq=False)
class RewardModel:
    """Rewards ``pi[t - 1, p]`` and coverage thresholds ``r[t - 1, p]``.

    Every step belongs to exactly one stage, so a (T, P) layout covers the
    stage-partitioned definition without redundancy.
    """

    pi: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        pi = np.array(self.pi, dtype=float)
        r = np.array(self.r)
        if pi.ndim != 2 or pi.shape != r.shape:
            raise InvalidInputError(f"rewards {pi.shape} and thresholds {r.shape} must share a (T, P) shape")
        if not np.all(np.isfinite(pi)) or np.any(pi < 0):
            raise InvalidInputError("rewards must be finite and non-negative")
        if r.size and (np.any(r != np.round(r)) or np.any(r < 1)):
            raise InvalidInputError("thresholds must be integers >= 1")
        r = r.astype(np.int64)
        pi.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class SatelliteSpec:
    altitude_km: float
    inclination_deg: float
    raan_deg: float
    arg_lat_deg: float
    c_max_kms: float
    in_budget_subset: bool = True

    def slot(self) -> OrbitalSlot:
        return OrbitalSlot(
            EARTH.earth_radius + self.altitude_km,
            math.radians(self.inclination_deg),
            math.radians(self.raan_deg),
            math.radians(self.arg_lat_deg),
        )


@dataclass(frozen=True)
class TargetSpec:
    lat_deg: float
    lon_deg: float
    min_elevation_deg: float = 0.0

    def target(self) -> GroundTarget:
        return GroundTarget(
            math.radians(self.lat_deg), math.radians(self.lon_deg), math.radians(self.min_elevation_deg)
        )


@dataclass(frozen=True, eq=False)
class InstanceConfig:
    """Human-unit description of an instance; this is what instance files hold."""

    total_steps: int
    step_seconds: float
    stages: int
    satellites: tuple[SatelliteSpec, ...]
    targets: tuple[TargetSpec, ...]
    rewards: np.ndarray
    thresholds: np.ndarray
    slot_grid: SlotGridSpec = field(default_factory=SlotGridSpec)
    gmst0_deg: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "satellites", tuple(self.satellites))
        object.__setattr__(self, "targets", tuple(self.targets))
        shape = (self.total_steps, len(self.targets))
        for name in ("rewards", "thresholds"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != shape:
                raise InvalidInputError(f"{name} shape {arr.shape} != (T, P) = {shape}")


@dataclass(frozen=True, eq=False)
class McrpInstance:
    grid: TimeGrid
    graph: ReconfigurationGraph
    visibility: VisibilityTensor
    rewards: RewardModel
    budgets: tuple[float, ...]
    budget_subset: frozenset[int]
    targets: tuple[GroundTarget, ...] = ()
    config: InstanceConfig | None = None

    def __post_init__(self):
        K, J = self.graph.satellites, self.graph.slots
        T = self.grid.total_steps
        if self.graph.grid != self.grid or self.visibility.grid != self.grid:
            raise InvalidInputError("graph, visibility and instance must share one time grid")
        vK, vJ, vT, vP = self.visibility.shape
        if (vK, vJ, vT) != (K, J, T):
            raise InvalidInputError(f"visibility {self.visibility.shape} does not match (K, J, T) = {(K, J, T)}")
        if self.rewards.pi.shape != (T, vP):
            raise InvalidInputError(f"rewards {self.rewards.pi.shape} do not match (T, P) = {(T, vP)}")
        if len(self.budgets) != K:
            raise InvalidInputError("one budget per satellite expected")
        if any(math.isnan(b) or b < 0 for b in self.budgets):
            raise InvalidInputError("budgets must be non-negative")
        if not set(self.budget_subset) <= set(range(K)):
            raise InvalidInputError("budget subset must name existing satellites")
        object.__setattr__(self, "budgets", tuple(float(b) for b in self.budgets))
        object.__setattr__(self, "budget_subset", frozenset(self.budget_subset))

    @classmethod
    def synthetic(
        cls,
        costs,
        visibility,
        rewards,
        thresholds=None,
        budgets: Sequence[float] | float = math.inf,
        budget_subset=None,
        step_seconds: float = 100.0,
    ) -> "McrpInstance":
        """Instance from raw arrays: costs (K, J, J), visibility (K, J, T, P), rewards (N, T/N, P) or (T, P).

        Rewards given per stage are flattened in stage order, which fixes N.
        """
        pi = np.asarray(rewards, dtype=float)
        if pi.ndim == 3:
            N = pi.shape[0]
            pi = pi.reshape(-1, pi.shape[-1])
        else:
            N = 1
        T = pi.shape[0]
        grid = TimeGrid(T, step_seconds, N)
        r = np.ones(pi.shape, dtype=np.int64) if thresholds is None else np.asarray(thresholds).reshape(pi.shape)
        costs = np.asarray(costs, dtype=float)
        K = costs.shape[0]
        if np.isscalar(budgets):
            budgets = [float(budgets)] * K
        if budget_subset is None:
            budget_subset = [k for k in range(K) if math.isfinite(budgets[k])]
        return cls(
            grid,
            ReconfigurationGraph.synthetic(costs, grid),
            VisibilityTensor(np.asarray(visibility, dtype=bool), grid),
            RewardModel(pi, r),
            tuple(budgets),
            frozenset(budget_subset),
        )

    @property
    def shape(self) -> tuple[int, int, int, int, int]:
        """(N, K, J, T, P)."""
        K, J, T, P = self.visibility.shape
        return self.grid.stage_count, K, J, T, P

    @property
    def effective_budgets(self) -> np.ndarray:
        """Budgets with ``inf`` for satellites outside the constrained subset."""
        return np.array(
            [b if k in self.budget_subset else math.inf for k, b in enumerate(self.budgets)]
        )

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256()
        N, K, J, T, P = self.shape
        h.update(np.array([N, K, J, T, P], dtype=np.int64).tobytes())
        h.update(self.graph.costs.tobytes())
        h.update(np.packbits(self.visibility.bits).tobytes())
        h.update(self.rewards.pi.tobytes())
        h.update(self.rewards.r.tobytes())
        h.update(np.array(self.budgets).tobytes())
        h.update(np.array(sorted(self.budget_subset), dtype=np.int64).tobytes())
        return h.hexdigest()[:16]


def build_instance(config: InstanceConfig, workers: int = 1) -> McrpInstance:
    """Propagate, grid, price and test visibility for an instance description."""
    grid = TimeGrid(config.total_steps, config.step_seconds, config.stages)
    slots = [sat.slot() for sat in config.satellites]
    budgets = [sat.c_max_kms for sat in config.satellites]
    graph = build_graph(slots, grid, config.slot_grid, budgets, workers=workers)
    targets = tuple(t.target() for t in config.targets)
    vis = compute_visibility(
        [lat.slots for lat in graph.slot_grids], targets, grid, math.radians(config.gmst0_deg), workers
    )
    subset = frozenset(k for k, sat in enumerate(config.satellites) if sat.in_budget_subset)
    return McrpInstance(
        grid, graph, vis, RewardModel(config.rewards, config.thresholds), tuple(budgets), subset, targets, config
    )


@dataclass(frozen=True)
class ReconfigurationPlan:
    """``assignment[s - 1][k]`` is the slot held by satellite ``k`` during stage ``s``."""

    assignment: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(j) for j in row) for row in self.assignment)
        if len({len(r) for r in rows}) > 1:
            raise InvalidPlanError("every stage must assign every satellite")
        object.__setattr__(self, "assignment", rows)

    @classmethod
    def all_stay(cls, stages: int, satellites: int) -> "ReconfigurationPlan":
        return cls(((0,) * satellites,) * stages)

    @property
    def stages(self) -> int:
        return len(self.assignment)

    @property
    def satellites(self) -> int:
        return len(self.assignment[0]) if self.assignment else 0

    def path(self, k: int) -> list[int]:
        """Slot sequence of satellite ``k`` including the stage-0 origin."""
        return [0] + [row[k] for row in self.assignment]

    def flat(self) -> tuple[int, ...]:
        """Stage-major flattening; the order used for lexicographic tie-breaks."""
        return tuple(j for row in self.assignment for j in row)


@dataclass(frozen=True)
class Violation:
    kind: str  # "shape", "slot-index" or "budget"
    satellite: int | None
    stage: int | None
    message: str


def _validate(plan: ReconfigurationPlan, instance: McrpInstance):
    N, K, J, _, _ = instance.shape
    if plan.stages != N or plan.satellites != K:
        raise InvalidPlanError(f"plan is {plan.stages}x{plan.satellites}, instance needs {N}x{K}")
    for s, row in enumerate(plan.assignment, start=1):
        for k, j in enumerate(row):
            if not 0 <= j < J:
                raise InvalidPlanError(f"stage {s} satellite {k}: slot {j} outside 0..{J - 1}")


def coverage_counts(plan: ReconfigurationPlan, instance: McrpInstance) -> np.ndarray:
    """Number of satellites seeing each (step, target)."""
    _validate(plan, instance)
    grid, bits = instance.grid, instance.visibility.bits
    counts = np.zeros(instance.rewards.pi.shape, dtype=np.int64)
    for s, row in enumerate(plan.assignment, start=1):
        sl = grid.stage_slice(s)
        for k, j in enumerate(row):
            counts[sl] += bits[k, j, sl]
    return counts


def coverage_states(plan: ReconfigurationPlan, instance: McrpInstance) -> np.ndarray:
    """Boolean ``y[t - 1, p]``: at least ``r`` satellites see target ``p`` at step ``t``."""
    return coverage_counts(plan, instance) >= instance.rewards.r


def stage_objectives(plan: ReconfigurationPlan, instance: McrpInstance) -> list[float]:
    y = coverage_states(plan, instance)
    earned = np.where(y, instance.rewards.pi, 0.0)
    return [float(earned[instance.grid.stage_slice(s)].sum()) for s in range(1, plan.stages + 1)]


def objective(plan: ReconfigurationPlan, instance: McrpInstance) -> float:
    """Total reward of the plan, summed stage by stage."""
    return float(sum(stage_objectives(plan, instance)))


def plan_delta_v(plan: ReconfigurationPlan, instance: McrpInstance) -> list[float]:
    """Delta-v consumed by each satellite along its path."""
    _validate(plan, instance)
    costs = instance.graph.costs
    out = []
    for k in range(plan.satellites):
        path = plan.path(k)
        out.append(float(sum(costs[k, a, b] for a, b in zip(path, path[1:]))))
    return out


def remaining_budget(prefix: Sequence[Sequence[int]], k: int, instance: McrpInstance) -> float:
    """Budget left to satellite ``k`` after the stages in ``prefix`` (stage 1 first)."""
    costs = instance.graph.costs
    spent, prev = 0.0, 0
    for row in prefix:
        spent += costs[k, prev, row[k]]
        prev = row[k]
    return float(instance.budgets[k] - spent)


def check_feasibility(plan: ReconfigurationPlan, instance: McrpInstance) -> list[Violation]:
    """Every violation of the plan; an empty list means feasible."""
    N, K, J, _, _ = instance.shape
    if plan.stages != N or plan.satellites != K:
        return [Violation("shape", None, None, f"plan is {plan.stages}x{plan.satellites}, instance needs {N}x{K}")]
    out = []
    for s, row in enumerate(plan.assignment, start=1):
        for k, j in enumerate(row):
            if not 0 <= j < J:
                out.append(Violation("slot-index", k, s, f"slot {j} outside 0..{J - 1}"))
    if out:
        return out
    costs = instance.graph.costs
    for k in sorted(instance.budget_subset):
        path = plan.path(k)
        spent = 0.0
        for s in range(1, N + 1):
            spent += costs[k, path[s - 1], path[s]]
            if spent > instance.budgets[k] + BUDGET_TOL:
                out.append(
                    Violation(
                        "budget",
                        k,
                        s,
                        f"satellite {k} has spent {spent:.6f} km/s by stage {s}, "
                        f"budget {instance.budgets[k]:.6f} km/s",
                    )
                )
                break
    return out
