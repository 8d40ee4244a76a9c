import math

import numpy as np
import pytest

from mcrp.astro import EARTH, OrbitalSlot, TimeGrid, propagate, walker_delta
from mcrp.errors import InvalidInputError
from mcrp.visibility import GroundTarget, VisibilityTensor, compute_visibility, elevation

A_1000 = EARTH.earth_radius + 1000.0


def _sat_over_origin():
    # equatorial orbit, u = 0 puts the satellite over lat 0, lon 0 when GMST is 0
    return OrbitalSlot(A_1000, 0.0, 0.0, 0.0)


def test_zenith_elevation():
    grid = TimeGrid(1, 1.0, 1)
    pos, _ = propagate(_sat_over_origin(), 1, grid)
    assert elevation(pos, GroundTarget(0.0, 0.0), 1, grid) == pytest.approx(math.pi / 2)


def test_far_side_is_below_horizon():
    grid = TimeGrid(1, 1.0, 1)
    pos, _ = propagate(_sat_over_origin(), 1, grid)
    assert elevation(pos, GroundTarget(0.0, math.pi), 1, grid) < 0


def test_horizon_half_angle_bisection():
    # central angle at which a 1000 km satellite drops to 5 deg elevation: 25.55 deg
    grid = TimeGrid(1, 1.0, 1)
    pos, _ = propagate(_sat_over_origin(), 1, grid)
    min_el = math.radians(5.0)
    lo, hi = 0.0, math.pi / 2
    for _ in range(60):
        mid = (lo + hi) / 2
        if elevation(pos, GroundTarget(mid, 0.0), 1, grid) >= min_el:
            lo = mid
        else:
            hi = mid
    assert math.degrees(lo) == pytest.approx(25.55, abs=0.01)
    closed_form = math.acos(EARTH.earth_radius / A_1000 * math.cos(min_el)) - min_el
    assert lo == pytest.approx(closed_form, abs=1e-9)


def test_compute_visibility_matches_scalar_predicate():
    grid = TimeGrid(120, 60.0, 2)
    sats = walker_delta(math.radians(80), 2, 1000.0)
    slots = [[s, OrbitalSlot(s.semi_major_axis, s.inclination, s.raan, 1.0)] for s in sats]
    targets = [GroundTarget(math.radians(30), math.radians(10), math.radians(5)), GroundTarget(0.3, -2.0)]
    gmst0 = 0.7
    vis = compute_visibility(slots, targets, grid, gmst0)
    assert vis.shape == (2, 2, 120, 2)
    for k in range(2):
        for j in range(2):
            for t in range(1, 121, 7):
                pos, _ = propagate(slots[k][j], t, grid)
                for p, tg in enumerate(targets):
                    expected = elevation(pos, tg, t, grid, gmst0) >= tg.min_elevation
                    assert vis.bits[k, j, t - 1, p] == expected


def test_visibility_independent_of_workers():
    grid = TimeGrid(300, 100.0, 3)
    sats = walker_delta(math.radians(80), 3, 800.0)
    slots = [[OrbitalSlot(s.semi_major_axis, s.inclination, s.raan, q * 0.5) for q in range(4)] for s in sats]
    targets = [GroundTarget(0.1 * p, 0.5 * p, 0.05) for p in range(4)]
    one = compute_visibility(slots, targets, grid, 0.2, workers=1)
    many = compute_visibility(slots, targets, grid, 0.2, workers=4)
    assert np.array_equal(one.bits, many.bits)
    assert one.bits.any()


def test_stage_view_and_at():
    grid = TimeGrid(6, 10.0, 3)
    bits = np.zeros((1, 1, 6, 1), dtype=bool)
    bits[0, 0, 2, 0] = True
    vis = VisibilityTensor(bits, grid)
    assert vis.stage(2).shape == (1, 1, 2, 1) and vis.stage(2)[0, 0, 0, 0]
    assert vis.at(2, 0, 0, 0, 3) and not vis.at(1, 0, 0, 0, 3)
    with pytest.raises(ValueError):
        vis.bits[0, 0, 0, 0] = True


def test_tensor_shape_checked():
    with pytest.raises(InvalidInputError):
        VisibilityTensor(np.zeros((1, 1, 5, 1), dtype=bool), TimeGrid(6, 1.0, 1))


def test_target_validation():
    with pytest.raises(InvalidInputError):
        GroundTarget(2.0, 0.0)
    with pytest.raises(InvalidInputError):
        GroundTarget(0.0, 0.0, math.pi / 2)
    assert GroundTarget(0.0, 3 * math.pi / 2).longitude == pytest.approx(-math.pi / 2)


def test_elevation_rejects_buried_satellite():
    grid = TimeGrid(1, 1.0, 1)
    with pytest.raises(InvalidInputError):
        elevation([100.0, 0.0, 0.0], GroundTarget(0.0, 0.0), 1, grid)


def test_empty_inputs():
    grid = TimeGrid(4, 1.0, 1)
    assert compute_visibility([], [], grid).shape == (0, 0, 4, 0)
    with pytest.raises(InvalidInputError):
        compute_visibility([[_sat_over_origin()], []], [GroundTarget(0, 0)], grid)
