"""Solution procedures: exhaustive oracle, exact branch-and-bound, myopic and
rolling-horizon policies, the no-reconfiguration baseline, and the
budget-free upper bound."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import InvalidInputError
from ..model import (
    BUDGET_TOL,
    McrpInstance,
    ReconfigurationPlan,
    objective,
    objective_close,
    stage_objectives,
)
from .metrics import duality_gap
from .search import WindowSearch, shortest_paths, stage_data

METHODS = ("exact", "bruteforce", "mp", "rhp", "baseline", "ub")


@dataclass(frozen=True)
class UpperBound:
    """Budget-free bound: ``per_satellite[s - 1][k]`` is the best weighted coverage of satellite ``k`` in stage ``s``."""

    value: float
    per_stage: tuple[float, ...]
    per_satellite: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class SolveReport:
    method: str
    objective: float | None
    plan: ReconfigurationPlan | None
    best_bound: float | None
    duality_gap: float | None
    stage_objectives: tuple[float, ...]
    runtime: float
    nodes: int = 0
    subproblems: int = 0
    timed_out: bool = False
    lookahead: int | None = None
    upper_bound: UpperBound | None = None
    lp_relaxation_value: float | None = None
    instance_digest: str = ""
    extra: dict = field(default_factory=dict)


def upper_bound(instance: McrpInstance) -> UpperBound:
    """Sum over stages and satellites of ``max_j sum_{t,p} (pi / r) * V``."""
    weight = instance.rewards.pi / instance.rewards.r
    bits = instance.visibility.bits
    per_sat = []
    for s in range(1, instance.grid.stage_count + 1):
        sl = instance.grid.stage_slice(s)
        w = weight[sl]
        row = []
        for k in range(bits.shape[0]):
            scores = [float((w * bits[k, j, sl]).sum()) for j in range(bits.shape[1])]
            row.append(max(scores, default=0.0))
        per_sat.append(tuple(row))
    per_stage = tuple(float(sum(row)) for row in per_sat)
    return UpperBound(float(sum(per_stage)), per_stage, tuple(per_sat))


def _report(method, instance, plan, bound, runtime, **kw) -> SolveReport:
    z = objective(plan, instance)
    return SolveReport(
        method=method,
        objective=z,
        plan=plan,
        best_bound=bound,
        duality_gap=None if bound is None else duality_gap(bound, z),
        stage_objectives=tuple(stage_objectives(plan, instance)),
        runtime=runtime,
        instance_digest=instance.digest,
        **kw,
    )


def solve_baseline(instance: McrpInstance) -> SolveReport:
    """Objective of the plan in which no satellite ever moves."""
    t0 = time.perf_counter()
    N, K, _, _, _ = instance.shape
    ub = upper_bound(instance)
    plan = ReconfigurationPlan.all_stay(N, K)
    return _report("baseline", instance, plan, ub.value, time.perf_counter() - t0, upper_bound=ub)


def solve_bruteforce(instance: McrpInstance, limit: int = 2_000_000) -> SolveReport:
    """Enumerate every plan; first maximum in stage-major lexicographic order wins.

    Stage rewards are tabulated per configuration directly from the raw
    visibility, threshold and reward arrays so this oracle shares no code
    with the branch-and-bound.
    """
    t0 = time.perf_counter()
    N, K, J, _, P = instance.shape
    count = J ** (N * K)
    if count > limit:
        raise InvalidInputError(f"{count} candidate plans exceed the enumeration limit {limit}; use the exact solver")
    bits, pi, r = instance.visibility.bits, instance.rewards.pi, instance.rewards.r
    tables = []
    for s in range(1, N + 1):
        steps = instance.grid.stage_steps(s)
        table = {}
        for config in itertools.product(range(J), repeat=K):
            total = 0.0
            for t in steps:
                for p in range(P):
                    viewers = sum(1 for k in range(K) if bits[k, config[k], t - 1, p])
                    if viewers >= r[t - 1, p]:
                        total += pi[t - 1, p]
            table[config] = total
        tables.append(table)
    costs = instance.graph.costs
    budgets = instance.effective_budgets
    best, best_flat = -math.inf, None
    for flat in itertools.product(range(J), repeat=N * K):
        rows = [flat[i * K : (i + 1) * K] for i in range(N)]
        ok = True
        for k in range(K):
            rem, prev = budgets[k], 0
            for row in rows:
                c = costs[k, prev, row[k]]
                if c > rem + BUDGET_TOL:
                    ok = False
                    break
                rem -= c
                prev = row[k]
            if not ok:
                break
        if not ok:
            continue
        value = sum(tables[i][rows[i]] for i in range(N))
        if best_flat is None or (value > best and not objective_close(value, best)):
            best, best_flat = value, flat
    plan = ReconfigurationPlan(tuple(best_flat[i * K : (i + 1) * K] for i in range(N)))
    z = objective(plan, instance)
    return _report("bruteforce", instance, plan, z, time.perf_counter() - t0, nodes=count)


class _Context:
    """Per-instance data shared by the window searches of one solve."""

    def __init__(self, instance: McrpInstance):
        self.instance = instance
        N = instance.grid.stage_count
        self.stages = {s: stage_data(instance, s) for s in range(1, N + 1)}
        self.dist = shortest_paths(instance.graph.costs)

    def window(self, first, last, start, budget, gap_tol=0.0, time_limit=None):
        search = WindowSearch(
            self.instance, self.stages, self.dist, first, last, start, budget, gap_tol, time_limit
        )
        return search.run()


def solve_exact_bnb(instance: McrpInstance, time_limit: float | None = None, gap_tolerance: float = 0.0) -> SolveReport:
    """Branch-and-bound over the whole horizon; optimal when it finishes within ``time_limit``."""
    if not 0.0 <= gap_tolerance <= 1.0:
        raise InvalidInputError("gap tolerance must lie in [0, 1]")
    t0 = time.perf_counter()
    N, K, _, _, _ = instance.shape
    ctx = _Context(instance)
    res = ctx.window(1, N, [0] * K, instance.effective_budgets, gap_tolerance, time_limit)
    plan = ReconfigurationPlan(tuple(res.assignment))
    return _report(
        "exact",
        instance,
        plan,
        res.best_bound,
        time.perf_counter() - t0,
        nodes=res.nodes,
        subproblems=1,
        timed_out=res.timed_out,
        extra={"root_bound": res.root_bound},
    )


def _rolling(instance: McrpInstance, lookahead: int, time_limit, method: str) -> SolveReport:
    N, K, _, _, _ = instance.shape
    if not 0 <= lookahead <= N - 1:
        raise InvalidInputError(f"lookahead must lie in 0..{N - 1}, got {lookahead}")
    t0 = time.perf_counter()
    ctx = _Context(instance)
    costs = instance.graph.costs
    cur = [0] * K
    rem = instance.effective_budgets.copy()
    rows: list[tuple[int, ...]] = []
    nodes = subproblems = 0
    timed_out = False
    s = 1
    while s <= N:
        last = min(s + lookahead, N)
        res = ctx.window(s, last, cur, rem, 0.0, time_limit)
        nodes += res.nodes
        subproblems += 1
        timed_out |= res.timed_out
        keep = res.assignment if last == N else res.assignment[:1]
        for row in keep:
            for k, j in enumerate(row):
                rem[k] -= costs[k, cur[k], j]
                cur[k] = j
            rows.append(row)
        s += len(keep)
    plan = ReconfigurationPlan(tuple(rows))
    ub = upper_bound(instance)
    return _report(
        method,
        instance,
        plan,
        ub.value,
        time.perf_counter() - t0,
        nodes=nodes,
        subproblems=subproblems,
        timed_out=timed_out,
        lookahead=lookahead,
        upper_bound=ub,
    )


def solve_mp(instance: McrpInstance, time_limit: float | None = None) -> SolveReport:
    """Myopic policy: optimise each stage alone with the budget left over, in order."""
    return replace(_rolling(instance, 0, time_limit, "mp"), lookahead=None)


def solve_rhp(instance: McrpInstance, lookahead: int, time_limit: float | None = None) -> SolveReport:
    """Rolling horizon: optimise stages ``s..s+L`` jointly and commit stage ``s``.

    Once the window reaches the final stage the whole remaining horizon is
    committed at once.
    """
    return _rolling(instance, lookahead, time_limit, "rhp")


def solve_upper_bound(instance: McrpInstance) -> SolveReport:
    t0 = time.perf_counter()
    ub = upper_bound(instance)
    return SolveReport(
        method="ub",
        objective=None,
        plan=None,
        best_bound=ub.value,
        duality_gap=None,
        stage_objectives=(),
        runtime=time.perf_counter() - t0,
        upper_bound=ub,
        instance_digest=instance.digest,
    )


def solve(instance: McrpInstance, method: str, lookahead: int | None = None, time_limit=None, gap_tol=0.0):
    """Dispatch on a method name from ``METHODS``."""
    if method == "exact":
        return solve_exact_bnb(instance, time_limit, gap_tol)
    if method == "bruteforce":
        return solve_bruteforce(instance)
    if method == "mp":
        return solve_mp(instance, time_limit)
    if method == "rhp":
        if lookahead is None:
            raise InvalidInputError("the rolling-horizon policy needs a lookahead")
        return solve_rhp(instance, lookahead, time_limit)
    if method == "baseline":
        return solve_baseline(instance)
    if method == "ub":
        return solve_upper_bound(instance)
    raise InvalidInputError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
