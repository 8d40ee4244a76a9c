"""Multi-stage constellation reconfiguration planning.

Time-expanded graphs over candidate orbital slots, delta-v transfer costs,
target visibility, and exact and sequential solvers that maximize
time-weighted observation rewards.
"""

from .astro import EARTH, Constants, OrbitalSlot, TimeGrid, mean_motion, propagate, walker_delta
from .errors import (
    GridRangeError,
    InfeasibleTransferError,
    InvalidInputError,
    InvalidPlanError,
    McrpError,
    SchemaError,
    UndefinedBoundError,
    UnsupportedTransferError,
)
from .maneuver import (
    PhasingSolution,
    SlotGridSpec,
    generate_slot_grid,
    inclination_bound,
    phasing_cost,
    plane_change_cost,
    raan_bound,
    transfer_cost,
)
from .model import (
    InstanceConfig,
    McrpInstance,
    ReconfigurationPlan,
    RewardModel,
    build_instance,
    check_feasibility,
    coverage_states,
    objective,
    remaining_budget,
)
from .teg import ReconfigurationGraph, build_graph, feasible_edges
from .visibility import GroundTarget, VisibilityTensor, compute_visibility, elevation

__all__ = [
    "EARTH",
    "Constants",
    "GridRangeError",
    "GroundTarget",
    "InfeasibleTransferError",
    "InstanceConfig",
    "InvalidInputError",
    "InvalidPlanError",
    "McrpError",
    "McrpInstance",
    "OrbitalSlot",
    "PhasingSolution",
    "ReconfigurationGraph",
    "ReconfigurationPlan",
    "RewardModel",
    "SchemaError",
    "SlotGridSpec",
    "TimeGrid",
    "UndefinedBoundError",
    "UnsupportedTransferError",
    "VisibilityTensor",
    "build_graph",
    "build_instance",
    "check_feasibility",
    "compute_visibility",
    "coverage_states",
    "elevation",
    "feasible_edges",
    "generate_slot_grid",
    "inclination_bound",
    "mean_motion",
    "objective",
    "phasing_cost",
    "plane_change_cost",
    "propagate",
    "raan_bound",
    "remaining_budget",
    "transfer_cost",
    "walker_delta",
]
