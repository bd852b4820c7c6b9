import numpy as np
import pytest

from srm_irl.features import default_lqr_classes
from srm_irl.mdp import GaussianLinearPolicy, InitialDistribution, LqrSystem, sample_demonstration

A2 = np.array([[1.0, 0.1], [0.0, 1.0]])
B2 = 0.1 * np.eye(2)


def riccati_gain(a, b, q, r, discount, iterations=5000):
    """Discounted infinite-horizon LQR gain (a = K s) by value iteration."""
    a, b, q, r = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (a, b, q, r))
    p = np.zeros_like(q)
    for _ in range(iterations):
        gain = -np.linalg.solve(r + discount * b.T @ p @ b, discount * b.T @ p @ a)
        p = q + gain.T @ r @ gain + discount * (a + b @ gain).T @ p @ (a + b @ gain)
    return -np.linalg.solve(r + discount * b.T @ p @ b, discount * b.T @ p @ a)


def make_system(horizon=50, discount=0.9):
    return LqrSystem(A2, B2, horizon, discount)


def make_demo(n=50, horizon=10, seed=0, gain=None, noise_std=0.1):
    system = make_system(horizon)
    gain = -0.5 * np.eye(2) if gain is None else gain
    policy = GaussianLinearPolicy(gain, noise_std)
    demo = sample_demonstration(system, policy, InitialDistribution.box(2), n, seed)
    return system, policy, demo


@pytest.fixture
def small_case():
    return make_demo()


@pytest.fixture
def classes():
    return default_lqr_classes(2, 2)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
