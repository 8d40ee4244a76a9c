"""Two-body circular-orbit primitives and mission time bookkeeping.

All angles are radians and all epochs are 1-based time-step indices; step
``t`` occurs ``(t - 1) * step_seconds`` after the mission epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import GridRangeError, InvalidInputError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Constants:
    mu: float = 398600.4418  # km^3/s^2
    earth_radius: float = 6378.137  # km
    earth_rotation_rate: float = 7.2921159e-5  # rad/s


EARTH = Constants()


def wrap_2pi(angle: float) -> float:
    """Wrap to [0, 2*pi)."""
    wrapped = math.fmod(angle, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def wrap_pi(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = wrap_2pi(angle)
    return wrapped - TWO_PI if wrapped > math.pi else wrapped


@dataclass(frozen=True)
class OrbitalSlot:
    """A circular orbit with its argument of latitude at a reference step.

    ``arg_lat_epoch`` is the argument of latitude at step ``ref_time``.
    Construction normalizes RAAN and argument of latitude into [0, 2*pi).
    """

    semi_major_axis: float
    inclination: float
    raan: float
    arg_lat_epoch: float
    ref_time: int = 1

    def __post_init__(self):
        a = self.semi_major_axis
        if not math.isfinite(a) or a <= EARTH.earth_radius:
            raise InvalidInputError(f"semi-major axis {a!r} km is not above the Earth's surface")
        if not (0.0 <= self.inclination <= math.pi):
            raise InvalidInputError(f"inclination {self.inclination!r} rad outside [0, pi]")
        if self.ref_time < 1:
            raise InvalidInputError("ref_time is a 1-based step index")
        object.__setattr__(self, "raan", wrap_2pi(self.raan))
        object.__setattr__(self, "arg_lat_epoch", wrap_2pi(self.arg_lat_epoch))

    @property
    def altitude(self) -> float:
        return self.semi_major_axis - EARTH.earth_radius


@dataclass(frozen=True)
class TimeGrid:
    """Discrete horizon of ``total_steps`` steps split into ``stage_count`` equal stages."""

    total_steps: int
    step_seconds: float
    stage_count: int
    stage_starts: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        T, N = self.total_steps, self.stage_count
        if T < 1 or N < 1:
            raise InvalidInputError("time grid needs at least one step and one stage")
        if not self.step_seconds > 0:
            raise InvalidInputError("step_seconds must be positive")
        if T % N:
            raise InvalidInputError(
                f"T/N = {T}/{N} = {T / N:g} is not an integer; stages must have equal length"
            )
        width = T // N
        object.__setattr__(self, "stage_starts", tuple(s * width + 1 for s in range(N)))

    @property
    def stage_length(self) -> int:
        return self.total_steps // self.stage_count

    def stage_steps(self, s: int) -> range:
        """1-based steps owned by stage ``s`` (1..N)."""
        if not 1 <= s <= self.stage_count:
            raise GridRangeError(f"stage {s} outside 1..{self.stage_count}")
        start = self.stage_starts[s - 1]
        return range(start, start + self.stage_length)

    def stage_slice(self, s: int) -> slice:
        """0-based array slice for stage ``s``."""
        steps = self.stage_steps(s)
        return slice(steps.start - 1, steps.stop - 1)

    def stage_of(self, t: int) -> int:
        self.check_step(t)
        return (t - 1) // self.stage_length + 1

    def check_step(self, t: int) -> None:
        if not 1 <= t <= self.total_steps:
            raise GridRangeError(f"step {t} outside 1..{self.total_steps}")

    def seconds(self, t) -> float | np.ndarray:
        """Elapsed seconds from the epoch to step ``t``."""
        return (np.asarray(t, dtype=float) - 1.0) * self.step_seconds


def mean_motion(a: float) -> float:
    """Circular mean motion sqrt(mu / a^3) in rad/s."""
    if not math.isfinite(a) or a <= EARTH.earth_radius:
        raise InvalidInputError(f"semi-major axis {a!r} km is not above the Earth's surface")
    return math.sqrt(EARTH.mu / a**3)


def arg_lat_at(slot: OrbitalSlot, seconds_from_ref: float | np.ndarray):
    n = mean_motion(slot.semi_major_axis)
    return np.mod(slot.arg_lat_epoch + n * np.asarray(seconds_from_ref, dtype=float), TWO_PI)


def inertial_position(slot: OrbitalSlot, u) -> np.ndarray:
    """Position for argument(s) of latitude ``u``; trailing axis is xyz."""
    u = np.asarray(u, dtype=float)
    a, inc, raan = slot.semi_major_axis, slot.inclination, slot.raan
    cu, su = np.cos(u), np.sin(u)
    co, so, ci, si = math.cos(raan), math.sin(raan), math.cos(inc), math.sin(inc)
    return np.stack(
        [a * (co * cu - so * ci * su), a * (so * cu + co * ci * su), a * si * su], axis=-1
    )


def propagate(slot: OrbitalSlot, t: int, grid: TimeGrid) -> tuple[np.ndarray, float]:
    """Inertial position (km) and argument of latitude of ``slot`` at step ``t``."""
    grid.check_step(t)
    u = float(arg_lat_at(slot, (t - slot.ref_time) * grid.step_seconds))
    return inertial_position(slot, u), u


def advance(slot: OrbitalSlot, t: int, grid: TimeGrid) -> OrbitalSlot:
    """The same orbit re-referenced to step ``t``."""
    _, u = propagate(slot, t, grid)
    return OrbitalSlot(slot.semi_major_axis, slot.inclination, slot.raan, u, t)


def walker_delta(inclination: float, satellites: int, altitude: float) -> list[OrbitalSlot]:
    """Walker-delta i:K/K/0 pattern: one satellite per plane, zero relative phasing."""
    if satellites < 1:
        raise InvalidInputError("a constellation needs at least one satellite")
    a = EARTH.earth_radius + altitude
    return [
        OrbitalSlot(a, inclination, TWO_PI * k / satellites, 0.0) for k in range(satellites)
    ]


def gmst(epoch: datetime) -> float:
    """Greenwich mean sidereal angle (IAU-82) at a UTC epoch, in radians."""
    if epoch.tzinfo is None:
        epoch = epoch.replace(tzinfo=timezone.utc)
    j2000 = datetime(2000, 1, 1, 12, tzinfo=timezone.utc)
    centuries = (epoch - j2000).total_seconds() / 86400.0 / 36525.0
    seconds = (
        67310.54841
        + (876600.0 * 3600.0 + 8640184.812866) * centuries
        + 0.093104 * centuries**2
        - 6.2e-6 * centuries**3
    )
    return wrap_2pi(math.radians(math.fmod(seconds, 86400.0) / 240.0))
