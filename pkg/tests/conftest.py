import numpy as np
import pytest

from mcrp.model import McrpInstance

ACCEPTANCE_LINES: list[str] = []


def budget_trap() -> McrpInstance:
    """One satellite, two one-step stages, slots home (0), A (1) and B (2).

    Stage 1 pays 5 at home and 6 at A; stage 2 pays 10 only at B. Reaching
    A or B from home costs the whole budget, so grabbing A strands the
    satellite.
    """
    costs = np.array([[[0.0, 1.0, 1.0], [1.0, 0.0, 2.0], [1.0, 2.0, 0.0]]])
    vis = np.zeros((1, 3, 2, 3), dtype=bool)
    vis[0, 0, 0, 0] = True
    vis[0, 1, 0, 1] = True
    vis[0, 2, 1, 2] = True
    rewards = np.zeros((2, 1, 3))
    rewards[0, 0, 0] = 5.0
    rewards[0, 0, 1] = 6.0
    rewards[1, 0, 2] = 10.0
    return McrpInstance.synthetic(costs, vis, rewards, budgets=[1.0])


def random_micro(rng: np.random.Generator, max_k=2, max_n=3, max_j=6, max_t=60, max_p=3) -> McrpInstance:
    """Small random instance: integer rewards, thresholds up to K, random budgets."""
    K = int(rng.integers(1, max_k + 1))
    N = int(rng.integers(1, max_n + 1))
    J = int(rng.integers(2, max_j + 1))
    P = int(rng.integers(1, max_p + 1))
    width = int(rng.integers(1, max_t // N + 1))
    T = width * N
    costs = rng.uniform(0.0, 1.0, (K, J, J)).round(3)
    for k in range(K):
        np.fill_diagonal(costs[k], 0.0)
    vis = rng.random((K, J, T, P)) < rng.uniform(0.1, 0.5)
    rewards = rng.integers(0, 4, (T, P)).astype(float)
    thresholds = rng.integers(1, K + 1, (T, P))
    budgets = list(rng.uniform(0.0, 1.5, K).round(3))
    subset = [k for k in range(K) if rng.random() < 0.85]
    return McrpInstance.synthetic(
        costs, vis, rewards.reshape(N, width, P), thresholds, budgets, budget_subset=subset
    )


def micro_suite(count=200, seed=20240611):
    rng = np.random.default_rng(seed)
    return [random_micro(rng) for _ in range(count)]


@pytest.fixture
def trap():
    return budget_trap()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
