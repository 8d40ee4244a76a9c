"""Comparison metrics between algorithmic, optimal, bound and baseline objectives.

Each metric returns ``None`` when its denominator is zero instead of raising.
"""

from __future__ import annotations


def relative_performance(z_alg: float, z: float) -> float | None:
    """(z_alg - z) / z_alg; positive when the algorithm beats the reference."""
    if z_alg == 0:
        return None
    return (z_alg - z) / z_alg


def duality_gap(z_hat: float, z_alg: float) -> float | None:
    """|z_hat - z_alg| / |z_alg|."""
    if z_alg == 0:
        return None
    return abs(z_hat - z_alg) / abs(z_alg)


def improvement(z_best: float, z_b: float) -> float | None:
    """(z_best - z_b) / z_b: gain of reconfiguring over staying put."""
    if z_b == 0:
        return None
    return (z_best - z_b) / z_b


def metrics(z_alg: float, z: float | None, z_hat: float | None, z_b: float | None) -> dict[str, float | None]:
    """All three metrics at once; missing inputs give ``None`` entries."""
    return {
        "RP": None if z is None else relative_performance(z_alg, z),
        "DG": None if z_hat is None else duality_gap(z_hat, z_alg),
        "improvement": None if z_b is None else improvement(z_alg, z_b),
    }
