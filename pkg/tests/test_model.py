import math

import numpy as np
import pytest

from mcrp.errors import InvalidInputError, InvalidPlanError
from mcrp.maneuver import SlotGridSpec
from mcrp.model import (
    InstanceConfig,
    McrpInstance,
    ReconfigurationPlan,
    RewardModel,
    SatelliteSpec,
    TargetSpec,
    build_instance,
    check_feasibility,
    coverage_counts,
    coverage_states,
    objective,
    plan_delta_v,
    remaining_budget,
    stage_objectives,
)


def _two_sat():
    # K=2, N=2, J=2, T=4, P=1; slot 1 sees the target throughout, slot 0 never
    costs = np.array([[[0, 0.4], [0.4, 0]], [[0, 0.7], [0.7, 0]]], dtype=float)
    vis = np.zeros((2, 2, 4, 1), dtype=bool)
    vis[:, 1] = True
    rewards = np.array([[[1.0], [2.0]], [[3.0], [4.0]]])
    thresholds = np.array([1, 1, 2, 2])
    return McrpInstance.synthetic(costs, vis, rewards, thresholds, budgets=[0.5, 0.5], budget_subset=[0])


def test_shape_and_effective_budgets():
    inst = _two_sat()
    assert inst.shape == (2, 2, 2, 4, 1)
    assert list(inst.effective_budgets) == [0.5, math.inf]


def test_threshold_coverage():
    inst = _two_sat()
    plan = ReconfigurationPlan(((1, 0), (1, 1)))
    assert coverage_counts(plan, inst)[:, 0].tolist() == [1, 1, 2, 2]
    assert coverage_states(plan, inst)[:, 0].tolist() == [True, True, True, True]
    assert stage_objectives(plan, inst) == [3.0, 7.0]
    assert objective(plan, inst) == 10.0
    lone = ReconfigurationPlan(((1, 0), (1, 0)))
    assert stage_objectives(lone, inst) == [3.0, 0.0]


def test_delta_v_and_budgets():
    inst = _two_sat()
    plan = ReconfigurationPlan(((1, 1), (0, 1)))
    assert plan_delta_v(plan, inst) == pytest.approx([0.8, 0.7])
    assert remaining_budget(plan.assignment[:1], 0, inst) == pytest.approx(0.1)
    violations = check_feasibility(plan, inst)
    # satellite 1 is outside the budget subset; satellite 0 overruns at stage 2
    assert [(v.kind, v.satellite, v.stage) for v in violations] == [("budget", 0, 2)]
    assert check_feasibility(ReconfigurationPlan(((1, 1), (1, 0))), inst) == []


def test_feasibility_shape_and_index():
    inst = _two_sat()
    assert check_feasibility(ReconfigurationPlan(((0, 0),)), inst)[0].kind == "shape"
    bad = check_feasibility(ReconfigurationPlan(((0, 2), (0, 0))), inst)
    assert [(v.kind, v.satellite, v.stage) for v in bad] == [("slot-index", 1, 1)]
    with pytest.raises(InvalidPlanError):
        objective(ReconfigurationPlan(((0, 2), (0, 0))), inst)


def test_plan_helpers():
    plan = ReconfigurationPlan(((1, 2), (3, 4)))
    assert plan.path(1) == [0, 2, 4]
    assert plan.flat() == (1, 2, 3, 4)
    assert ReconfigurationPlan.all_stay(3, 2).assignment == ((0, 0),) * 3
    with pytest.raises(InvalidPlanError):
        ReconfigurationPlan(((0, 0), (0,)))


def test_reward_model_validation():
    with pytest.raises(InvalidInputError):
        RewardModel(np.ones((2, 1)), np.zeros((2, 1)))
    with pytest.raises(InvalidInputError):
        RewardModel(-np.ones((2, 1)), np.ones((2, 1)))
    with pytest.raises(InvalidInputError):
        RewardModel(np.ones((2, 1)), np.ones((3, 1)))


def test_instance_validation():
    with pytest.raises(InvalidInputError):
        McrpInstance.synthetic(np.zeros((1, 2, 2)), np.zeros((1, 3, 4, 1)), np.ones((4, 1)))
    with pytest.raises(InvalidInputError):
        McrpInstance.synthetic(np.zeros((1, 2, 2)), np.zeros((1, 2, 4, 1)), np.ones((4, 1)), budgets=[-1.0])


def test_digest_tracks_content():
    a, b = _two_sat(), _two_sat()
    assert a.digest == b.digest and len(a.digest) == 16
    c = McrpInstance.synthetic(
        a.graph.costs, a.visibility.bits, a.rewards.pi * 2, a.rewards.r, budgets=[0.5, 0.5], budget_subset=[0]
    )
    assert c.digest != a.digest


def test_build_instance_from_config():
    config = InstanceConfig(
        total_steps=60,
        step_seconds=120.0,
        stages=2,
        satellites=(SatelliteSpec(800.0, 80.0, 0.0, 0.0, 0.4), SatelliteSpec(800.0, 80.0, 180.0, 0.0, 0.4, False)),
        targets=(TargetSpec(10.0, 20.0, 5.0), TargetSpec(-40.0, 100.0, 5.0)),
        rewards=np.ones((60, 2)),
        thresholds=np.ones((60, 2), dtype=int),
        slot_grid=SlotGridSpec("phase-only", 5),
    )
    inst = build_instance(config)
    assert inst.shape == (2, 2, 5, 60, 2)
    assert inst.budget_subset == frozenset({0})
    assert inst.graph.initial_slots[1] == config.satellites[1].slot()
    with pytest.raises(InvalidInputError):
        InstanceConfig(60, 120.0, 2, config.satellites, config.targets, np.ones((59, 2)), np.ones((60, 2)))
