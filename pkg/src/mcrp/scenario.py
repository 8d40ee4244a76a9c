"""Random test-instance families, the Hurricane Harvey case study, and report tables."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .astro import TimeGrid, gmst
from .errors import InvalidInputError
from .maneuver import SlotGridSpec
from .model import (
    InstanceConfig,
    McrpInstance,
    ReconfigurationPlan,
    SatelliteSpec,
    TargetSpec,
    build_instance,
    coverage_states,
)
from .solvers.methods import SolveReport
from .solvers.metrics import improvement

HARVEY_EPOCH = datetime(2017, 8, 23, 12, 0, tzinfo=timezone.utc)
HARVEY_DURATION_S = 734_400.0  # 7344 steps of 100 s
HARVEY_MIN_ELEVATION_DEG = 10.0
CATEGORY_REWARDS = {
    "Tropical Depression": 1,
    "Tropical Storm": 2,
    "Category 1-2 Hurricane": 3,
    "Category 3+ Major Hurricane": 4,
}

Family = Literal["static", "dynamic"]


@dataclass(frozen=True)
class InstanceRecipe:
    """Parameters of a randomly generated comparative-analysis instance."""

    family: Family = "static"
    J: int = 50
    N: int = 3
    K: int = 3
    seed: int = 0
    altitude_range: tuple[float, float] = (700.0, 2000.0)
    latitude_range: tuple[float, float] = (-80.0, 80.0)
    longitude_range: tuple[float, float] = (-180.0, 180.0)
    min_elevation_deg: float = 5.0
    c_max: float = 0.6
    T: int = 4320
    step_seconds: float = 100.0
    P: int = 10
    inclination_deg: float = 80.0

    def __post_init__(self):
        if self.family not in ("static", "dynamic"):
            raise InvalidInputError(f"unknown instance family {self.family!r}")
        for name in ("J", "N", "K", "P", "T"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be positive")
        lo, hi = self.altitude_range
        if not 0 < lo <= hi:
            raise InvalidInputError("altitude range must be positive and ordered")
        lo, hi = self.latitude_range
        if not -90 <= lo <= hi <= 90:
            raise InvalidInputError("latitude range must lie in [-90, 90] and be ordered")
        lo, hi = self.longitude_range
        if not lo <= hi:
            raise InvalidInputError("longitude range must be ordered")
        if self.c_max <= 0:
            raise InvalidInputError("c_max must be positive")
        if not 0 <= self.min_elevation_deg < 90:
            raise InvalidInputError("minimum elevation must lie in [0, 90)")


def generate_random_config(recipe: InstanceRecipe) -> InstanceConfig:
    """Walker-delta constellation over random targets; fully determined by ``recipe.seed``."""
    TimeGrid(recipe.T, recipe.step_seconds, recipe.N)
    rng = np.random.default_rng(recipe.seed)
    altitude = float(rng.uniform(*recipe.altitude_range))
    lat = rng.uniform(*recipe.latitude_range, size=recipe.P)
    lon = rng.uniform(*recipe.longitude_range, size=recipe.P)
    sats = tuple(
        SatelliteSpec(altitude, recipe.inclination_deg, 360.0 * k / recipe.K, 0.0, recipe.c_max)
        for k in range(recipe.K)
    )
    targets = tuple(TargetSpec(float(a), float(b), recipe.min_elevation_deg) for a, b in zip(lat, lon))
    rewards = np.ones((recipe.T, recipe.P))
    if recipe.family == "dynamic":
        rewards[:] = 0.0
        width = recipe.T // recipe.N
        for s, group in enumerate(np.array_split(np.arange(recipe.P), recipe.N)):
            rewards[s * width : (s + 1) * width, group] = 1.0
    return InstanceConfig(
        total_steps=recipe.T,
        step_seconds=recipe.step_seconds,
        stages=recipe.N,
        satellites=sats,
        targets=targets,
        rewards=rewards,
        thresholds=np.ones((recipe.T, recipe.P), dtype=np.int64),
        slot_grid=SlotGridSpec("phase-only", recipe.J),
    )


def generate_random_instance(recipe: InstanceRecipe, workers: int = 1) -> McrpInstance:
    return build_instance(generate_random_config(recipe), workers)


@dataclass(frozen=True)
class TrackPoint:
    name: str
    time_utc: datetime
    latitude_deg: float
    longitude_deg_west: float
    category: str
    reward: int


def _rows(path: str | Path | None, default: str):
    if path is None:
        text = resources.files("mcrp").joinpath("data", default).read_text()
        label = default
    else:
        text = Path(path).read_text()
        label = str(path)
    return label, list(csv.DictReader(io.StringIO(text)))


def load_track(path: str | Path | None = None) -> list[TrackPoint]:
    """Read a storm-track CSV (longitudes in degrees west); the bundled Harvey track by default."""
    label, rows = _rows(path, "harvey_track.csv")
    points = []
    for n, row in enumerate(rows, start=2):
        try:
            category = row["category"].strip()
            reward = int(row["reward"])
            if CATEGORY_REWARDS.get(category) != reward:
                raise ValueError(f"category {category!r} does not carry reward {reward}")
            points.append(
                TrackPoint(
                    row["target"].strip(),
                    datetime.strptime(row["time_utc"].strip(), "%m/%d/%Y %H:%M").replace(tzinfo=timezone.utc),
                    float(row["lat_deg_n"]),
                    float(row["lon_deg_w"]),
                    category,
                    reward,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"{label} row {n}: {exc}") from exc
    if not points:
        raise InvalidInputError(f"{label}: no track points")
    return points


def load_satellites(path: str | Path | None = None) -> list[SatelliteSpec]:
    """Read satellite specifications at the epoch; the bundled Harvey set by default."""
    label, rows = _rows(path, "harvey_sats.csv")
    sats = []
    for n, row in enumerate(rows, start=2):
        try:
            sats.append(
                SatelliteSpec(
                    float(row["altitude_km"]),
                    float(row["inclination_deg"]),
                    float(row["raan_deg"]),
                    float(row["arg_lat_deg"]),
                    float(row["c_max_kms"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"{label} row {n}: {exc}") from exc
    return sats


def harvey_config(
    stages: int,
    track: str | Path | None = None,
    satellites: str | Path | None = None,
    step_seconds: float = 100.0,
    plane_steps: int = 4,
    phase_count: int = 24,
) -> InstanceConfig:
    """Case-study instance: each track point is a stationary target rewarded during its own window.

    Target ``p`` (0-based) earns its category reward on steps
    ``[p*T/P + 1, (p+1)*T/P]`` and nothing elsewhere.
    """
    T = HARVEY_DURATION_S / step_seconds
    if T != int(T):
        raise InvalidInputError(f"step of {step_seconds} s does not divide the {HARVEY_DURATION_S:g} s horizon")
    T = int(T)
    TimeGrid(T, step_seconds, stages)
    points = load_track(track)
    sats = load_satellites(satellites)
    P = len(points)
    if T % P:
        raise InvalidInputError(f"T = {T} steps cannot be split into {P} equal target windows")
    width = T // P
    rewards = np.zeros((T, P))
    for p, point in enumerate(points):
        rewards[p * width : (p + 1) * width, p] = float(point.reward)
    targets = tuple(
        TargetSpec(pt.latitude_deg, -pt.longitude_deg_west, HARVEY_MIN_ELEVATION_DEG) for pt in points
    )
    return InstanceConfig(
        total_steps=T,
        step_seconds=step_seconds,
        stages=stages,
        satellites=tuple(sats),
        targets=targets,
        rewards=rewards,
        thresholds=np.ones((T, P), dtype=np.int64),
        slot_grid=SlotGridSpec("plane-and-phase", phase_count, plane_steps, 0.8),
        gmst0_deg=math.degrees(gmst(HARVEY_EPOCH)),
    )


def load_harvey(
    track: str | Path | None = None,
    satellites: str | Path | None = None,
    stages: int = 1,
    step_seconds: float = 100.0,
    plane_steps: int = 4,
    phase_count: int = 24,
    workers: int = 1,
) -> McrpInstance:
    return build_instance(harvey_config(stages, track, satellites, step_seconds, plane_steps, phase_count), workers)


def interval_rewards(plan: ReconfigurationPlan, instance: McrpInstance, intervals: int) -> list[float]:
    """Earned reward per equal time interval (independent of the stage split)."""
    T = instance.grid.total_steps
    if T % intervals:
        raise InvalidInputError(f"{intervals} intervals do not divide T = {T}")
    earned = np.where(coverage_states(plan, instance), instance.rewards.pi, 0.0)
    return [float(x) for x in earned.reshape(intervals, -1).sum(axis=1)]


def interval_ceilings(instance: McrpInstance, intervals: int) -> list[float]:
    """Reward available per interval if every target were always covered."""
    T = instance.grid.total_steps
    if T % intervals:
        raise InvalidInputError(f"{intervals} intervals do not divide T = {T}")
    return [float(x) for x in instance.rewards.pi.reshape(intervals, -1).sum(axis=1)]


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def emit_report(
    reports: Sequence[SolveReport], instance: McrpInstance, intervals: int | None = None
) -> tuple[str, str]:
    """Method summary CSV and per-interval reward series CSV.

    Improvement is measured against the no-reconfiguration plan of
    ``instance``. Interval count defaults to the instance's stage count.
    """
    for rep in reports:
        if rep.instance_digest != instance.digest:
            raise InvalidInputError(
                f"report for method {rep.method!r} was produced on a different instance "
                f"({rep.instance_digest} != {instance.digest})"
            )
    intervals = intervals or instance.grid.stage_count
    N, K, _, _, _ = instance.shape
    stay = ReconfigurationPlan.all_stay(N, K)
    z_b = sum(interval_rewards(stay, instance, 1))
    summary = io.StringIO()
    series = io.StringIO()
    sw = csv.writer(summary, lineterminator="\n")
    qw = csv.writer(series, lineterminator="\n")
    sw.writerow(["method", "z", "best_bound", "dg_pct", "runtime_s", "improvement_pct"])
    qw.writerow(["interval", "method", "reward"])
    for rep in reports:
        label = rep.method if rep.lookahead is None else f"{rep.method}(L={rep.lookahead})"
        imp = None if rep.objective is None else improvement(rep.objective, z_b)
        sw.writerow(
            [
                label,
                _fmt(rep.objective),
                _fmt(rep.best_bound),
                _fmt(None if rep.duality_gap is None else 100 * rep.duality_gap),
                f"{rep.runtime:.3f}",
                _fmt(None if imp is None else 100 * imp),
            ]
        )
        if rep.plan is not None:
            for n, value in enumerate(interval_rewards(rep.plan, instance, intervals), start=1):
                qw.writerow([n, label, repr(value)])
    return summary.getvalue(), series.getvalue()
