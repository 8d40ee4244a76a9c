import math

import numpy as np
import pytest
from conftest import budget_trap, micro_suite, random_micro

from mcrp.errors import InvalidInputError
from mcrp.model import McrpInstance, ReconfigurationPlan, check_feasibility, objective
from mcrp.solvers import (
    dumps_report,
    loads_report,
    solve,
    solve_baseline,
    solve_bruteforce,
    solve_exact_bnb,
    solve_mp,
    solve_rhp,
    upper_bound,
)
from mcrp.solvers.metrics import duality_gap, improvement, metrics, relative_performance
from mcrp.solvers.search import shortest_paths


@pytest.fixture(scope="module")
def suite():
    return micro_suite(60, seed=7)


def test_budget_trap_values(trap):
    assert solve_baseline(trap).objective == 5
    assert solve_mp(trap).objective == 6
    assert solve_rhp(trap, 1).objective == 15
    exact = solve_exact_bnb(trap)
    assert exact.objective == 15 and exact.duality_gap is not None
    assert exact.best_bound == 15 and not exact.timed_out
    assert exact.plan.assignment == ((0,), (2,))
    assert solve_mp(trap).plan.assignment == ((1,), (1,))


def test_single_stage_trivia():
    costs = np.array([[[0.0, 0.5], [0.5, 0.0]]])
    vis = np.zeros((1, 2, 1, 2), dtype=bool)
    vis[0, 0, 0, 0] = vis[0, 1, 0, 1] = True
    inst = McrpInstance.synthetic(costs, vis, [[5.0, 7.0]], budgets=[1.0])
    assert solve_bruteforce(inst).objective == 7
    assert solve_exact_bnb(inst).objective == 7
    assert solve_mp(inst).objective == 7
    zero = McrpInstance.synthetic(costs, vis, [[0.0, 0.0]], budgets=[1.0])
    for method in ("bruteforce", "exact", "mp"):
        rep = solve(zero, method)
        assert rep.objective == 0 and rep.plan.assignment == ((0,),)


def test_exact_matches_bruteforce(suite):
    for inst in suite:
        bf, ex = solve_bruteforce(inst), solve_exact_bnb(inst)
        assert ex.objective == bf.objective
        assert ex.plan == bf.plan
        assert ex.best_bound >= ex.objective


def test_all_returned_plans_feasible(suite):
    for inst in suite:
        N = inst.grid.stage_count
        reports = [solve_exact_bnb(inst), solve_mp(inst), solve_baseline(inst)]
        reports += [solve_rhp(inst, L) for L in range(N)]
        for rep in reports:
            assert check_feasibility(rep.plan, inst) == []
            assert rep.objective == pytest.approx(objective(rep.plan, inst))


def test_rolling_horizon_reductions(suite):
    for inst in suite:
        N = inst.grid.stage_count
        assert solve_rhp(inst, 0).plan == solve_mp(inst).plan
        assert solve_rhp(inst, N - 1).objective == solve_exact_bnb(inst).objective


def test_policies_never_beat_exact(suite):
    for inst in suite:
        z = solve_exact_bnb(inst).objective
        assert solve_mp(inst).objective <= z
        assert all(solve_rhp(inst, L).objective <= z for L in range(inst.grid.stage_count))
        assert solve_baseline(inst).objective <= z <= upper_bound(inst).value + 1e-9


def test_refining_stages_never_hurts():
    # the same horizon split into 2m stages embeds every m-stage plan
    rng = np.random.default_rng(3)
    for _ in range(30):
        inst = random_micro(rng, max_n=1, max_t=24)
        T, P = inst.rewards.pi.shape
        if T % 2:
            continue
        fine = McrpInstance.synthetic(
            inst.graph.costs,
            inst.visibility.bits,
            inst.rewards.pi.reshape(2, T // 2, P),
            inst.rewards.r,
            inst.budgets,
            inst.budget_subset,
        )
        assert solve_exact_bnb(fine).objective >= solve_exact_bnb(inst).objective


def test_gap_tolerance_one_returns_baseline(suite):
    inst = suite[0]
    rep = solve_exact_bnb(inst, gap_tolerance=1.0)
    assert rep.plan == ReconfigurationPlan.all_stay(*inst.shape[:2])
    assert rep.best_bound == pytest.approx(upper_bound(inst).value)
    with pytest.raises(InvalidInputError):
        solve_exact_bnb(inst, gap_tolerance=1.5)


def test_time_limit_reports_incumbent_and_bound():
    rng = np.random.default_rng(5)
    inst = random_micro(rng, max_k=4, max_n=4, max_j=30, max_t=200, max_p=8)
    while min(inst.shape[:3]) < 3 or inst.shape[2] < 15:
        inst = random_micro(rng, max_k=4, max_n=4, max_j=30, max_t=200, max_p=8)
    rep = solve_exact_bnb(inst, time_limit=0.05)
    assert rep.timed_out
    assert check_feasibility(rep.plan, inst) == []
    assert rep.objective <= rep.best_bound <= upper_bound(inst).value + 1e-9
    assert rep.duality_gap == pytest.approx(duality_gap(rep.best_bound, rep.objective))


def test_bruteforce_limit():
    rng = np.random.default_rng(0)
    inst = random_micro(rng, max_j=6)
    with pytest.raises(InvalidInputError, match="exact"):
        solve_bruteforce(inst, limit=1)


def test_rhp_lookahead_range(trap):
    with pytest.raises(InvalidInputError):
        solve_rhp(trap, 2)
    with pytest.raises(InvalidInputError):
        solve_rhp(trap, -1)
    with pytest.raises(InvalidInputError):
        solve(trap, "rhp")
    with pytest.raises(InvalidInputError):
        solve(trap, "simplex")


def test_upper_bound_decomposition_and_scaling(suite):
    for inst in suite[:20]:
        ub = upper_bound(inst)
        assert ub.value == pytest.approx(sum(map(sum, ub.per_satellite)))
        assert ub.per_stage == pytest.approx([sum(row) for row in ub.per_satellite])
        doubled = McrpInstance.synthetic(
            inst.graph.costs,
            inst.visibility.bits,
            inst.rewards.pi.reshape(inst.grid.stage_count, -1, inst.rewards.pi.shape[1]),
            inst.rewards.r * 2,
            inst.budgets,
            inst.budget_subset,
        )
        assert upper_bound(doubled).value == ub.value / 2


def test_upper_bound_tight_for_one_unconstrained_satellite():
    rng = np.random.default_rng(11)
    for _ in range(10):
        inst = random_micro(rng, max_k=1, max_n=1)
        free = McrpInstance.synthetic(inst.graph.costs, inst.visibility.bits, inst.rewards.pi)
        assert upper_bound(free).value == pytest.approx(solve_exact_bnb(free).objective)


def test_shortest_paths():
    c = np.array([[[0, 5, 1], [5, 0, 1], [1, 1, 0]]], dtype=float)
    assert shortest_paths(c)[0, 0, 1] == 2.0


def test_metrics():
    assert relative_performance(26162, 19604) == pytest.approx(0.2507, abs=5e-5)
    assert duality_gap(26672, 26162) == pytest.approx(0.0195, abs=5e-5)
    assert improvement(26211, 13052) == pytest.approx(1.0082, abs=5e-5)
    assert relative_performance(7, 7) == 0
    assert relative_performance(0, 1) is None and duality_gap(1, 0) is None and improvement(1, 0) is None
    assert metrics(2.0, None, 4.0, 1.0) == {"RP": None, "DG": 1.0, "improvement": 1.0}


def test_report_round_trip(trap):
    for rep in (solve_exact_bnb(trap), solve_rhp(trap, 1), solve(trap, "ub")):
        text = dumps_report(rep)
        back = loads_report(text)
        assert dumps_report(back) == text
        assert back.objective == rep.objective and back.plan == rep.plan


def test_ub_method_has_no_plan(trap):
    rep = solve(trap, "ub")
    assert rep.plan is None and rep.objective is None
    assert rep.best_bound == upper_bound(trap).value == 16.0
    assert math.isfinite(rep.runtime)
