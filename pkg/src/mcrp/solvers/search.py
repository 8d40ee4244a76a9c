"""Depth-first branch-and-bound over a window of consecutive stages.

Decisions are taken stage by stage and, inside a stage, satellite by
satellite; children are visited in ascending slot order so the first optimum
found is the lexicographically smallest one in stage-major order. The same
search solves the full problem, one-stage myopic subproblems and rolling
windows.

Bounds per child node:

* stages already completed in the window contribute their exact reward;
* the current stage contributes the exact reward of the cells already
  covered plus, for every satellite still to be placed in this stage, its
  best budget-feasible share of the uncovered cells, each cell's reward split
  evenly over the viewers it still lacks;
* every later stage contributes the per-satellite maximum of
  ``sum(pi / r * V)`` over slots reachable within the remaining budget,
  capped by the stage's total reward.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..model import BUDGET_TOL, OBJECTIVE_RTOL, McrpInstance


@dataclass
class _Stage:
    pi: np.ndarray  # (C,) rewards of cells some slot can see
    r: np.ndarray  # (C,)
    vis: list[np.ndarray]  # per satellite (J, C) float 0/1
    weights: np.ndarray  # (K, J) sum of pi / r over visible cells
    total: float
    order: np.ndarray  # (K, J) slots sorted by descending weight
    sorted_weights: np.ndarray  # (K, J)


def stage_data(instance: McrpInstance, s: int) -> _Stage:
    grid = instance.grid
    sl = grid.stage_slice(s)
    pi = instance.rewards.pi[sl].ravel()
    r = instance.rewards.r[sl].ravel()
    K, J, _, P = instance.visibility.shape
    bits = instance.visibility.bits[:, :, sl, :].reshape(K, J, -1)
    keep = (pi > 0) & bits.any(axis=(0, 1))
    pi, r = pi[keep], r[keep]
    vis = [bits[k][:, keep].astype(float) for k in range(K)]
    weights = np.array([v @ (pi / r) for v in vis]).reshape(K, J)
    order = np.argsort(-weights, axis=1, kind="stable")
    sorted_weights = np.take_along_axis(weights, order, axis=1)
    return _Stage(pi, r, vis, weights, float(pi.sum()), order, sorted_weights)


def shortest_paths(costs: np.ndarray) -> np.ndarray:
    """All-pairs cheapest multi-hop transfer cost for each satellite (Floyd-Warshall)."""
    D = np.array(costs, dtype=float)
    J = D.shape[-1]
    for m in range(J):
        D = np.minimum(D, D[..., :, m : m + 1] + D[..., m : m + 1, :])
    return D


@dataclass
class WindowResult:
    assignment: list[tuple[int, ...]]  # one row per window stage
    value: float  # window reward
    best_bound: float
    root_bound: float
    nodes: int
    timed_out: bool


class _Timeout(Exception):
    pass


def _lex_less(a, b) -> bool:
    return tuple(a) < tuple(b)


class WindowSearch:
    """Solve the stages ``first..last`` exactly given slots and budgets entering ``first``.

    Args:
        instance: Problem instance.
        stages: Precomputed per-stage data, indexed by stage number.
        dist: Shortest-path tensor from ``shortest_paths``.
        first, last: Inclusive stage window (1-based).
        start: Slot of each satellite before stage ``first``.
        budget: Remaining budget of each satellite (``inf`` if unconstrained).
        gap_tol: Relative gap at which subtrees are abandoned.
        time_limit: Wall-clock limit in seconds, or ``None``.
    """

    def __init__(self, instance, stages, dist, first, last, start, budget, gap_tol=0.0, time_limit=None):
        self.inst = instance
        self.costs = instance.graph.costs
        self.stages = stages
        self.dist = dist
        self.first, self.last = first, last
        self.start = list(start)
        self.budget = np.array(budget, dtype=float)
        self.gap_tol = float(gap_tol)
        self.deadline = None if time_limit is None else time.perf_counter() + time_limit
        N, self.K, self.J, _, _ = instance.shape
        self.nodes = 0
        self.pruned_bound = -np.inf
        self.outstanding = -np.inf
        self.timed_out = False

    # -- bounds -----------------------------------------------------------

    def _future_term(self, s, k, slots, rems):
        """Best reachable stage-``s`` weight for satellite ``k`` from each (slot, budget)."""
        st = self.stages[s]
        reach = self.dist[k][np.asarray(slots)][:, st.order[k]] <= (np.asarray(rems) + BUDGET_TOL)[:, None]
        return st.sorted_weights[k][np.argmax(reach, axis=1)]

    def _feasible(self, k, cur, rem):
        return np.flatnonzero(self.costs[k, cur] <= rem + BUDGET_TOL)

    def root_bound(self) -> float:
        """Budget-free per-satellite maxima summed over the window."""
        return float(sum(self.stages[s].weights.max(axis=1).sum() for s in range(self.first, self.last + 1)))

    def _stage_reward(self, st, counts):
        return float(st.pi[counts >= st.r].sum())

    # -- warm start -------------------------------------------------------

    def _greedy(self):
        cur, rem = list(self.start), self.budget.copy()
        rows, value = [], 0.0
        for s in range(self.first, self.last + 1):
            st = self.stages[s]
            counts = np.zeros(st.pi.size)
            row = []
            for k in range(self.K):
                feas = self._feasible(k, cur[k], rem[k])
                gains = ((counts[None, :] + st.vis[k][feas]) >= st.r) @ st.pi
                j = int(feas[int(np.argmax(gains))])
                counts += st.vis[k][j]
                rem[k] -= self.costs[k, cur[k], j]
                cur[k] = j
                row.append(j)
            rows.append(tuple(row))
            value += self._stage_reward(st, counts)
        return rows, value

    def _stay_value(self):
        value = 0.0
        for s in range(self.first, self.last + 1):
            st = self.stages[s]
            counts = sum(st.vis[k][self.start[k]] for k in range(self.K)) if self.K else np.zeros(0)
            value += self._stage_reward(st, np.asarray(counts))
        return value

    # -- search -----------------------------------------------------------

    def _eps(self, value):
        return OBJECTIVE_RTOL * max(1.0, abs(value))

    def _accept(self, value, flat):
        inc = self.inc_value
        if value > inc + self._eps(inc) or (value >= inc - self._eps(inc) and _lex_less(flat, self.inc_flat)):
            self.inc_value, self.inc_flat = value, list(flat)

    def _prunable(self, bound, prefix):
        inc = self.inc_value
        eps = self._eps(inc)
        if bound < inc - eps:
            return True
        if self.gap_tol > 0 and bound - inc <= self.gap_tol * bound:
            self.pruned_bound = max(self.pruned_bound, bound)
            return True
        # a tie can only win if the subtree may hold a lexicographically smaller plan
        return bound <= inc + eps and tuple(prefix) > tuple(self.inc_flat[: len(prefix)])

    def _tick(self):
        self.nodes += 1
        if self.deadline is not None and (self.nodes & 63) == 0 and time.perf_counter() > self.deadline:
            raise _Timeout

    def _child_bounds(self, s, k, feas, cur, rem, counts, acc):
        st = self.stages[s]
        K = self.K
        child_rem = rem[k] - self.costs[k, cur[k], feas]
        new_counts = counts[None, :] + st.vis[k][feas]  # (n, C)
        covered = new_counts >= st.r
        exact = covered @ st.pi
        if k == K - 1:
            current = exact
        else:
            deficit = np.maximum(st.r[None, :] - new_counts, 1.0)
            w = np.where(covered, 0.0, st.pi[None, :] / deficit)
            extra = np.zeros(len(feas))
            for k2 in range(k + 1, K):
                f2 = self._feasible(k2, cur[k2], rem[k2])
                extra += (st.vis[k2][f2] @ w.T).max(axis=0)
            current = np.minimum(st.total, exact + extra)
        bound = acc + current
        for s2 in range(s + 1, self.last + 1):
            others = 0.0
            for k2 in range(K):
                if k2 != k:
                    others += self._future_term(s2, k2, [cur[k2]], [rem[k2]])[0]
            mine = self._future_term(s2, k, feas, child_rem)
            bound = bound + np.minimum(self.stages[s2].total, others + mine)
        return bound, child_rem

    def _dfs(self, s, k, cur, rem, counts, acc, prefix):
        self._tick()
        st = self.stages[s]
        feas = self._feasible(k, cur[k], rem[k])
        bounds, child_rem = self._child_bounds(s, k, feas, cur, rem, counts, acc)
        last_sat = k == self.K - 1
        for n, j in enumerate(feas):
            j = int(j)
            b = float(bounds[n])
            prefix.append(j)
            if self._prunable(b, prefix):
                prefix.pop()
                continue
            old_cur, old_rem = cur[k], rem[k]
            cur[k], rem[k] = j, child_rem[n]
            new_counts = counts + st.vis[k][j]
            try:
                if last_sat:
                    new_acc = acc + self._stage_reward(st, new_counts)
                    if s == self.last:
                        self._accept(new_acc, prefix)
                    else:
                        nxt = self.stages[s + 1]
                        self._dfs(s + 1, 0, cur, rem, np.zeros(nxt.pi.size), new_acc, prefix)
                else:
                    self._dfs(s, k + 1, cur, rem, new_counts, acc, prefix)
            except _Timeout:
                # the interrupted child and its unvisited siblings stay open
                self.outstanding = max([self.outstanding, *(float(x) for x in bounds[n:])])
                raise
            finally:
                cur[k], rem[k] = old_cur, old_rem
                prefix.pop()

    def run(self) -> WindowResult:
        width = self.last - self.first + 1
        stay_flat = [self.start[k] for _ in range(width) for k in range(self.K)]
        self.inc_flat, self.inc_value = stay_flat, self._stay_value()
        root = self.root_bound()
        if self.K == 0 or (self.gap_tol > 0 and root - self.inc_value <= self.gap_tol * root):
            return self._result(max(root, self.inc_value), root)
        rows, value = self._greedy()
        self._accept(value, [j for row in rows for j in row])
        try:
            first = self.stages[self.first]
            self._dfs(self.first, 0, list(self.start), self.budget.copy(), np.zeros(first.pi.size), 0.0, [])
        except _Timeout:
            self.timed_out = True
        bound = max(self.inc_value, self.pruned_bound, self.outstanding)
        if self.timed_out and not np.isfinite(self.outstanding):
            bound = max(bound, root)
        return self._result(bound, root)

    def _result(self, bound, root):
        K = self.K
        flat = self.inc_flat
        rows = [tuple(flat[i * K : (i + 1) * K]) for i in range(self.last - self.first + 1)]
        return WindowResult(rows, self.inc_value, float(bound), root, self.nodes, self.timed_out)
