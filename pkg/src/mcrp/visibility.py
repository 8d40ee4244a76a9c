"""Target visibility from candidate slots over a rotating spherical Earth."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .astro import EARTH, OrbitalSlot, TimeGrid, arg_lat_at, inertial_position
from .errors import InvalidInputError


@dataclass(frozen=True)
class GroundTarget:
    latitude: float
    longitude: float
    min_elevation: float = 0.0

    def __post_init__(self):
        if not -math.pi / 2 <= self.latitude <= math.pi / 2:
            raise InvalidInputError(f"latitude {self.latitude!r} rad out of range")
        if not 0.0 <= self.min_elevation < math.pi / 2:
            raise InvalidInputError("minimum elevation must lie in [0, pi/2)")
        lon = math.fmod(self.longitude + math.pi, 2 * math.pi)
        if lon < 0:
            lon += 2 * math.pi
        object.__setattr__(self, "longitude", lon - math.pi)


def _earth_angle(t, grid: TimeGrid, gmst0: float):
    return gmst0 + EARTH.earth_rotation_rate * grid.seconds(t)


def target_position(target: GroundTarget, theta) -> np.ndarray:
    """Inertial position of a ground target for Earth rotation angle(s) ``theta``."""
    lon = target.longitude + np.asarray(theta, dtype=float)
    cl = math.cos(target.latitude)
    R = EARTH.earth_radius
    return np.stack(
        [R * cl * np.cos(lon), R * cl * np.sin(lon), np.full_like(lon, R * math.sin(target.latitude))],
        axis=-1,
    )


def elevation(
    sat_position: Sequence[float], target: GroundTarget, t: int, grid: TimeGrid, gmst0: float = 0.0
) -> float:
    """Elevation (rad) of a satellite above the local horizon of ``target`` at step ``t``."""
    r_sat = np.asarray(sat_position, dtype=float)
    if np.linalg.norm(r_sat) <= EARTH.earth_radius:
        raise InvalidInputError("satellite position is not above the Earth's surface")
    grid.check_step(t)
    r_tgt = target_position(target, _earth_angle(t, grid, gmst0))
    los = r_sat - r_tgt
    zenith = r_tgt / EARTH.earth_radius
    sin_el = float(los @ zenith) / float(np.linalg.norm(los))
    return math.asin(max(-1.0, min(1.0, sin_el)))


@dataclass(frozen=True, eq=False)
class VisibilityTensor:
    """Boolean visibility ``bits[k, j, t - 1, p]``.

    Slot ``j`` of satellite ``k`` is the same propagated orbit in every stage,
    so a stage-``s`` vertex owns exactly the columns ``grid.stage_slice(s)``.
    """

    bits: np.ndarray
    grid: TimeGrid

    def __post_init__(self):
        if self.bits.ndim != 4 or self.bits.shape[2] != self.grid.total_steps:
            raise InvalidInputError(
                f"visibility shape {self.bits.shape} does not match (K, J, {self.grid.total_steps}, P)"
            )
        if self.bits.dtype != np.bool_:
            object.__setattr__(self, "bits", self.bits.astype(bool))
        self.bits.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.bits.shape

    def stage(self, s: int) -> np.ndarray:
        """View ``(K, J, |T_s|, P)`` for stage ``s``."""
        return self.bits[:, :, self.grid.stage_slice(s), :]

    def at(self, s: int, k: int, j: int, p: int, t: int) -> bool:
        if self.grid.stage_of(t) != s:
            return False
        return bool(self.bits[k, j, t - 1, p])


def _slot_visibility(slot, targets, grid, gmst0, sin_min, target_xyz):
    steps = np.arange(1, grid.total_steps + 1)
    u = arg_lat_at(slot, (steps - slot.ref_time) * grid.step_seconds)
    r_sat = inertial_position(slot, u)[:, None, :]  # (T, 1, 3)
    los = r_sat - target_xyz  # (T, P, 3)
    up = np.einsum("tpx,tpx->tp", los, target_xyz) / EARTH.earth_radius
    return up >= np.linalg.norm(los, axis=-1) * sin_min


def compute_visibility(
    slots: Sequence[Sequence[OrbitalSlot]],
    targets: Sequence[GroundTarget],
    grid: TimeGrid,
    gmst0: float = 0.0,
    workers: int = 1,
) -> VisibilityTensor:
    """Evaluate the visibility predicate for every (satellite, slot, step, target).

    ``slots[k]`` lists the candidate slots of satellite ``k``; all satellites
    must have the same number of slots. Work is split over ``workers``
    threads by slot; each thread writes a disjoint block, so the result does
    not depend on the worker count.
    """
    K = len(slots)
    J = len(slots[0]) if K else 0
    if any(len(row) != J for row in slots):
        raise InvalidInputError("every satellite needs the same number of candidate slots")
    P = len(targets)
    bits = np.zeros((K, J, grid.total_steps, P), dtype=bool)
    if K == 0 or J == 0 or P == 0:
        return VisibilityTensor(bits, grid)

    theta = _earth_angle(np.arange(1, grid.total_steps + 1), grid, gmst0)
    target_xyz = np.stack([target_position(tg, theta) for tg in targets], axis=1)  # (T, P, 3)
    sin_min = np.array([math.sin(tg.min_elevation) for tg in targets])

    def work(kj):
        k, j = kj
        bits[k, j] = _slot_visibility(slots[k][j], targets, grid, gmst0, sin_min, target_xyz)

    jobs = [(k, j) for k in range(K) for j in range(J)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, jobs))
    else:
        for job in jobs:
            work(job)
    return VisibilityTensor(bits, grid)
