"""Delta-v cost model and candidate slot grids.

Transfers happen at a fixed altitude. A plane change (inclination and RAAN
together) is a single impulsive burn; a phase change is a two-burn circular
coplanar phasing maneuver. When both are needed the plane change goes first
and the two costs add.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .astro import EARTH, TWO_PI, OrbitalSlot, TimeGrid, advance, mean_motion, wrap_pi
from .errors import (
    InfeasibleTransferError,
    InvalidInputError,
    UndefinedBoundError,
    UnsupportedTransferError,
)

MAX_REVOLUTIONS = 5
# angle deltas are snapped to this grid so equal lattice offsets price identically
_ANGLE_QUANTUM = 1e-9
_ALTITUDE_TOL = 1e-6


@dataclass(frozen=True)
class PhasingSolution:
    k_target: int
    k_transfer: int
    a_phase: float
    delta_v: float
    duration: float


def _snap(angle: float) -> float:
    return round(angle / _ANGLE_QUANTUM) * _ANGLE_QUANTUM


def _circular_speed(a: float) -> float:
    if not math.isfinite(a) or a <= EARTH.earth_radius:
        raise InvalidInputError(f"semi-major axis {a!r} km is not above the Earth's surface")
    return math.sqrt(EARTH.mu / a)


def phasing_candidates(a: float, delta_u: float):
    """Yield every (k_target, k_transfer, phase representation) candidate.

    Each item is ``(k_target, k_transfer, du, t_phase, a_phase, feasible)``.
    Candidates with non-positive phasing time carry ``a_phase = nan``.
    """
    n = mean_motion(a)
    reps = [delta_u] if delta_u == 0.0 else [delta_u, delta_u - math.copysign(TWO_PI, delta_u)]
    for du in reps:
        for k_target in range(1, MAX_REVOLUTIONS + 1):
            for k_transfer in range(1, MAX_REVOLUTIONS + 1):
                t_phase = (TWO_PI * k_target + du) / n
                if t_phase <= 0.0:
                    yield k_target, k_transfer, du, t_phase, math.nan, False
                    continue
                a_phase = (EARTH.mu * (t_phase / (TWO_PI * k_transfer)) ** 2) ** (1.0 / 3.0)
                feasible = min(a, 2.0 * a_phase - a) > EARTH.earth_radius
                yield k_target, k_transfer, du, t_phase, a_phase, feasible


@lru_cache(maxsize=65536)
def _phasing(a: float, delta_u: float) -> PhasingSolution:
    v = _circular_speed(a)
    best = None
    for k_target, k_transfer, _, t_phase, a_phase, feasible in phasing_candidates(a, delta_u):
        if not feasible:
            continue
        dv = 2.0 * abs(math.sqrt(EARTH.mu * (2.0 / a - 1.0 / a_phase)) - v)
        if best is None or dv < best.delta_v:
            best = PhasingSolution(k_target, k_transfer, a_phase, dv, t_phase * k_transfer)
    if best is None:
        raise InfeasibleTransferError(
            f"no phasing orbit within {MAX_REVOLUTIONS} revolutions clears the surface "
            f"(a={a} km, du={delta_u} rad)"
        )
    return best


def phasing_cost(a: float, delta_u: float) -> PhasingSolution:
    """Minimum delta-v coplanar phasing for an argument-of-latitude change ``delta_u``.

    Revolutions of the target and transfer orbit are enumerated independently
    up to five each, over both representations of the phase change. Positive
    ``delta_u`` means a phasing period of ``(2*pi*k + delta_u) / n``.
    """
    if not -TWO_PI < delta_u < TWO_PI:
        raise InvalidInputError("delta_u must lie in (-2*pi, 2*pi)")
    _circular_speed(a)
    if delta_u == 0.0:
        return PhasingSolution(1, 1, a, 0.0, TWO_PI / mean_motion(a))
    return _phasing(a, delta_u)


@lru_cache(maxsize=65536)
def _plane_change(a: float, i1: float, i2: float, delta_raan: float) -> float:
    # haversine form of cos(theta) = cos i1 cos i2 + sin i1 sin i2 cos(dRAAN);
    # exact zero for identical planes
    h = math.sin((i2 - i1) / 2.0) ** 2 + math.sin(i1) * math.sin(i2) * math.sin(delta_raan / 2.0) ** 2
    return 2.0 * _circular_speed(a) * math.sqrt(min(1.0, max(0.0, h)))


def plane_change_cost(a: float, i1: float, i2: float, delta_raan: float) -> float:
    """Single-burn delta-v rotating the orbit plane by the angle between (i1, 0) and (i2, dRAAN)."""
    for name, value in (("i1", i1), ("i2", i2)):
        if not 0.0 <= value <= math.pi:
            raise InvalidInputError(f"{name}={value!r} rad outside [0, pi]")
    _circular_speed(a)
    return _plane_change(a, i1, i2, delta_raan)


def transfer_cost(origin: OrbitalSlot, target: OrbitalSlot, step_seconds: float | None = None) -> float:
    """Delta-v (km/s) to move from ``origin`` to ``target``.

    If the slots are referenced to different steps, ``origin`` is first
    propagated to ``target.ref_time``, which needs ``step_seconds``.
    """
    a = origin.semi_major_axis
    if abs(a - target.semi_major_axis) > _ALTITUDE_TOL:
        raise UnsupportedTransferError(
            f"altitude change {origin.semi_major_axis} -> {target.semi_major_axis} km is not modelled"
        )
    u_origin = origin.arg_lat_epoch
    if origin.ref_time != target.ref_time:
        if step_seconds is None:
            raise InvalidInputError("slots at different epochs need step_seconds to be compared")
        dt = (target.ref_time - origin.ref_time) * step_seconds
        u_origin = math.fmod(u_origin + mean_motion(a) * dt, TWO_PI)
    d_raan = _snap(wrap_pi(target.raan - origin.raan))
    d_u = _snap(wrap_pi(target.arg_lat_epoch - u_origin))
    if origin.inclination == target.inclination and d_raan == 0.0:
        plane = 0.0
    else:
        plane = _plane_change(a, origin.inclination, target.inclination, d_raan)
    phase = 0.0 if d_u == 0.0 else _phasing(a, d_u).delta_v
    return plane + phase


def inclination_bound(a: float, c_max: float, eta: float = 0.8) -> float:
    """Largest inclination offset reachable by one burn of the full budget, scaled by ``eta``."""
    ratio = c_max / (2.0 * _circular_speed(a))
    if not 0.0 <= ratio <= 1.0:
        raise InvalidInputError(f"budget {c_max} km/s outside the single-burn domain")
    return 2.0 * eta * math.asin(ratio)


def raan_bound(a: float, i: float, c_max: float, eta: float = 0.8) -> float:
    """Largest RAAN offset reachable by one burn of the full budget, scaled by ``eta``.

    The arccos takes the unscaled single-burn angle and ``eta`` multiplies the
    result; this is the placement that reproduces the realized Harvey grids.
    """
    if math.sin(i) == 0.0:
        raise UndefinedBoundError("RAAN offset is undefined for an equatorial orbit")
    delta_raw = inclination_bound(a, c_max, 1.0)
    arg = (math.cos(delta_raw) - math.cos(i) ** 2) / math.sin(i) ** 2
    if not -1.0 - 1e-12 <= arg <= 1.0 + 1e-12:
        raise InvalidInputError("RAAN bound arccos argument outside [-1, 1]")
    return eta * math.acos(max(-1.0, min(1.0, arg)))


GridMode = Literal["phase-only", "plane-and-phase"]


@dataclass(frozen=True)
class SlotGridSpec:
    mode: GridMode = "phase-only"
    phase_count: int = 50
    plane_steps_per_side: int = 4
    eta: float = 0.8

    def __post_init__(self):
        if self.mode not in ("phase-only", "plane-and-phase"):
            raise InvalidInputError(f"unknown slot grid mode {self.mode!r}")
        if self.phase_count < 1:
            raise InvalidInputError("phase_count must be positive")
        if self.mode == "plane-and-phase" and self.plane_steps_per_side < 0:
            raise InvalidInputError("plane_steps_per_side must be non-negative")
        if not self.eta > 0:
            raise InvalidInputError("eta must be positive")

    @property
    def plane_count(self) -> int:
        return 1 if self.mode == "phase-only" else 4 * self.plane_steps_per_side + 1

    @property
    def size(self) -> int:
        return self.plane_count * self.phase_count


def plane_offsets(spec: SlotGridSpec) -> list[tuple[int, int]]:
    """Lattice offsets (inclination steps, RAAN steps) in slot-index order.

    The current plane comes first, then inclination offsets -m..-1, +1..+m,
    then RAAN offsets in the same order.
    """
    if spec.mode == "phase-only":
        return [(0, 0)]
    m = spec.plane_steps_per_side
    steps = [*range(-m, 0), *range(1, m + 1)]
    return [(0, 0)] + [(d, 0) for d in steps] + [(0, d) for d in steps]


@dataclass(frozen=True, eq=False)
class SlotGrid:
    """Candidate slots around a centre slot; index ``j = plane * phase_count + q``."""

    spec: SlotGridSpec
    center: OrbitalSlot
    inclination_step: float
    raan_step: float
    slots: tuple[OrbitalSlot, ...]

    def __len__(self):
        return len(self.slots)

    def __getitem__(self, j):
        return self.slots[j]

    def plane_index(self, j: int) -> int:
        return j // self.spec.phase_count

    def phase_index(self, j: int) -> int:
        return j % self.spec.phase_count

    def advanced(self, t: int, grid: TimeGrid) -> "SlotGrid":
        """The same lattice re-referenced to step ``t``."""
        return SlotGrid(
            self.spec,
            advance(self.center, t, grid),
            self.inclination_step,
            self.raan_step,
            tuple(advance(slot, t, grid) for slot in self.slots),
        )


def generate_slot_grid(
    current: OrbitalSlot, spec: SlotGridSpec, initial_budget: float | None = None
) -> SlotGrid:
    """Lattice of candidate slots around ``current``; slot 0 coincides with it.

    Phase-only grids keep the plane and space ``phase_count`` arguments of
    latitude evenly around the orbit. Plane-and-phase grids cross
    ``4 * plane_steps_per_side + 1`` planes (inclination and RAAN offsets in
    units of bound / plane_steps_per_side) with ``phase_count`` phases.
    """
    di = dr = 0.0
    if spec.mode == "plane-and-phase" and spec.plane_steps_per_side > 0:
        if initial_budget is None or not initial_budget > 0:
            raise InvalidInputError("plane-and-phase grids need a positive budget")
        a = current.semi_major_axis
        di = inclination_bound(a, initial_budget, spec.eta) / spec.plane_steps_per_side
        dr = raan_bound(a, current.inclination, initial_budget, spec.eta) / spec.plane_steps_per_side
    dq = TWO_PI / spec.phase_count
    slots = []
    for inc_steps, raan_steps in plane_offsets(spec):
        inc = current.inclination + inc_steps * di
        if not 0.0 <= inc <= math.pi:
            raise InvalidInputError(f"grid inclination {math.degrees(inc):.3f} deg leaves [0, 180]")
        raan = current.raan + raan_steps * dr
        for q in range(spec.phase_count):
            slots.append(
                OrbitalSlot(current.semi_major_axis, inc, raan, current.arg_lat_epoch + q * dq, current.ref_time)
            )
    return SlotGrid(spec, current, di, dr, tuple(slots))


def cost_matrix(grid: SlotGrid) -> np.ndarray:
    """All-pairs ``transfer_cost`` between slots of one lattice referenced to one step."""
    slots = grid.slots
    J = len(slots)
    out = np.empty((J, J))
    for i in range(J):
        origin = slots[i]
        for j in range(J):
            out[i, j] = 0.0 if i == j else transfer_cost(origin, slots[j])
    return out
