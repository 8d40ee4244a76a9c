"""Export of the full integer program in CPLEX LP text format.

Names: ``x_s{s}_k{k}_i{i}_j{j}`` for the edge from slot ``i`` (stage ``s - 1``)
to slot ``j`` (stage ``s``) of satellite ``k``; ``y_s{s}_t{t}_p{p}`` for the
coverage state of target ``p`` at step ``t``. Stage 0 holds the single
initial vertex ``i = 0``.
"""

from __future__ import annotations

import io
import math

from ..model import McrpInstance

_MAX_LINE = 250


def _num(v: float) -> str:
    return format(float(v), ".17g")


def _x(s, k, i, j):
    return f"x_s{s}_k{k}_i{i}_j{j}"


def _y(s, t, p):
    return f"y_s{s}_t{t}_p{p}"


class _Writer:
    def __init__(self):
        self.buf = io.StringIO()

    def line(self, text=""):
        self.buf.write(text + "\n")

    def expr(self, head: str, terms: list[str], tail: str):
        """Write ``head terms tail`` wrapping long rows at term boundaries."""
        cur = " " + head if head else ""
        for term in terms:
            piece = " " + term
            if len(cur) + len(piece) > _MAX_LINE:
                self.line(cur)
                cur = "  "
            cur += piece
        piece = " " + tail if tail else ""
        if len(cur) + len(piece) > _MAX_LINE:
            self.line(cur)
            cur = "  "
        self.line(cur + piece)


def _signed(coef: float, name: str, first: bool) -> str:
    sign = "-" if coef < 0 else "+"
    mag = abs(coef)
    body = name if mag == 1 else f"{_num(mag)} {name}"
    if first:
        return body if sign == "+" else f"- {body}"
    return f"{sign} {body}"


def _terms(pairs) -> list[str]:
    return [_signed(c, n, i == 0) for i, (c, n) in enumerate(pairs)]


def export_lp(instance: McrpInstance) -> str:
    """The integer program as LP text, objective sense ``Maximize``."""
    N, K, J, T, P = instance.shape
    grid = instance.grid
    costs = instance.graph.costs
    bits = instance.visibility.bits
    pi, r = instance.rewards.pi, instance.rewards.r

    def sources(s):
        return range(1) if s == 1 else range(J)

    w = _Writer()
    w.line(f"\\ constellation reconfiguration: N={N} K={K} J={J} T={T} P={P}")
    w.line("Maximize")
    obj = [(pi[t - 1, p], _y(s, t, p)) for s in range(1, N + 1) for t in grid.stage_steps(s) for p in range(P)]
    obj = [(c, n) for c, n in obj if c != 0]
    if not obj:
        obj = [(0.0, _x(1, 0, 0, 0) if K else _y(1, 1, 0))]
    w.expr("obj:", _terms(obj), "")
    w.line("Subject To")
    for k in range(K):
        w.expr(f"INIT_k{k}:", _terms([(1, _x(1, k, 0, j)) for j in range(J)]), "= 1")
    for s in range(1, N):
        for k in range(K):
            for i in range(J):
                out = [(1, _x(s + 1, k, i, j)) for j in range(J)]
                inn = [(-1, _x(s, k, q, i)) for q in sources(s)]
                w.expr(f"FLOW_s{s}_k{k}_i{i}:", _terms(out + inn), "= 0")
    for s in range(1, N + 1):
        for t in grid.stage_steps(s):
            for p in range(P):
                pairs = [
                    (1, _x(s, k, i, j))
                    for k in range(K)
                    for j in range(J)
                    if bits[k, j, t - 1, p]
                    for i in sources(s)
                ]
                pairs.append((-int(r[t - 1, p]), _y(s, t, p)))
                w.expr(f"COV_s{s}_t{t}_p{p}:", _terms(pairs), ">= 0")
    for k in sorted(instance.budget_subset):
        budget = instance.budgets[k]
        if not math.isfinite(budget):
            continue
        pairs = [
            (costs[k, i, j], _x(s, k, i, j))
            for s in range(1, N + 1)
            for i in sources(s)
            for j in range(J)
            if costs[k, i, j] != 0
        ]
        if not pairs:
            continue
        w.expr(f"RES_k{k}:", _terms(pairs), f"<= {_num(budget)}")
    w.line("Binaries")
    names = [_x(s, k, i, j) for s in range(1, N + 1) for k in range(K) for i in sources(s) for j in range(J)]
    names += [_y(s, t, p) for s in range(1, N + 1) for t in grid.stage_steps(s) for p in range(P)]
    w.expr("", names, "")
    w.line("End")
    return w.buf.getvalue()


def lp_counts(instance: McrpInstance) -> dict[str, int]:
    """Variable and row counts of the exported program."""
    N, K, J, T, P = instance.shape
    x = K * (J + (N - 1) * J * J)
    return {"x": x, "y": T * P, "INIT": K, "FLOW": (N - 1) * K * J, "COV": T * P}
