"""Exact and sequential solvers, bounds, metrics and LP export."""

from .lp import export_lp, lp_counts
from .methods import (
    METHODS,
    SolveReport,
    UpperBound,
    solve,
    solve_baseline,
    solve_bruteforce,
    solve_exact_bnb,
    solve_mp,
    solve_rhp,
    solve_upper_bound,
    upper_bound,
)
from .metrics import duality_gap, improvement, metrics, relative_performance
from .reports import dumps_report, loads_report, report_from_dict, report_to_dict

__all__ = [
    "METHODS",
    "SolveReport",
    "UpperBound",
    "duality_gap",
    "dumps_report",
    "export_lp",
    "improvement",
    "loads_report",
    "lp_counts",
    "metrics",
    "relative_performance",
    "report_from_dict",
    "report_to_dict",
    "solve",
    "solve_baseline",
    "solve_bruteforce",
    "solve_exact_bnb",
    "solve_mp",
    "solve_rhp",
    "solve_upper_bound",
    "upper_bound",
]
