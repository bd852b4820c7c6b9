"""Forward REINFORCE training of the expert and maximum-likelihood gain recovery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grad_risk import discounted_tail_sums
from .mdp import Demonstration, GaussianLinearPolicy, InitialDistribution, LqrSystem, rollout_batch

RewardFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class TrainingError(RuntimeError):
    def __init__(self, episode: int, message: str = "non-finite return"):
        super().__init__(f"training diverged at episode {episode}: {message}")
        self.episode = episode


class EstimationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    """REINFORCE-with-baseline settings.

    ``baseline`` is the number of past batches whose per-timestep mean
    returns form the moving-average baseline. Updates use Adam.
    """

    episodes: int = 60
    batch_size: int = 200
    learning_rate: float = 0.1
    baseline: int = 5
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999

    def __post_init__(self):
        if min(self.episodes, self.batch_size, self.baseline) < 1:
            raise ValueError("episodes, batch_size and baseline must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")


@dataclass(frozen=True)
class TrainingResult:
    policy: GaussianLinearPolicy
    returns: np.ndarray  # average discounted return of each episode's batch


def quadratic_cost_reward(q_mat, r_mat) -> RewardFn:
    """r(s, a) = -(s'Qs + a'Ra), batched over leading axes."""
    q_mat = np.asarray(q_mat, dtype=float)
    r_mat = np.asarray(r_mat, dtype=float)

    def reward(s, a):
        return -(np.einsum("...i,ij,...j->...", s, q_mat, s) + np.einsum("...i,ij,...j->...", a, r_mat, a))

    return reward


def train_reinforce(
    system: LqrSystem,
    true_reward: RewardFn,
    config: TrainConfig = TrainConfig(),
    noise_std: float = 0.1,
    init_dist: InitialDistribution | None = None,
    initial_gain=None,
) -> TrainingResult:
    """Gradient ascent on the discounted return with a moving-average baseline."""
    rng = np.random.default_rng(config.seed)
    if init_dist is None:
        init_dist = InitialDistribution.box(system.state_dim)
    gain = (
        np.zeros((system.action_dim, system.state_dim))
        if initial_gain is None
        else np.array(initial_gain, dtype=float)
    )
    first = np.zeros_like(gain)
    second = np.zeros_like(gain)
    history: list[np.ndarray] = []
    returns = []
    for episode in range(config.episodes):
        policy = GaussianLinearPolicy(gain, noise_std)
        with np.errstate(over="ignore", invalid="ignore"):
            states, actions = rollout_batch(system, policy, init_dist.sample(rng, config.batch_size), rng)
            rewards = true_reward(states[:, :-1], actions)
            to_go = discounted_tail_sums(rewards, system.discount, axis=1)
        if not np.all(np.isfinite(to_go)):
            raise TrainingError(episode)
        returns.append(to_go[:, 0].mean())

        baseline = np.mean(history[-config.baseline:], axis=0) if history else np.zeros(system.horizon)
        history.append(to_go.mean(axis=0))
        resid = actions - states[:, :-1] @ gain.T
        grad = np.einsum("bti,btj,bt->ij", resid, states[:, :-1], to_go - baseline)
        grad /= noise_std**2 * config.batch_size

        first = config.beta1 * first + (1 - config.beta1) * grad
        second = config.beta2 * second + (1 - config.beta2) * grad**2
        m_hat = first / (1 - config.beta1 ** (episode + 1))
        v_hat = second / (1 - config.beta2 ** (episode + 1))
        gain = gain + config.learning_rate * m_hat / (np.sqrt(v_hat) + 1e-8)
        if not np.all(np.isfinite(gain)):
            raise TrainingError(episode, "non-finite gain")
    return TrainingResult(GaussianLinearPolicy(gain, noise_std), np.array(returns))


def estimate_gain_mle(demo: Demonstration, noise_std: float | None = None) -> np.ndarray:
    """Least-squares fit of actions on states, the Gaussian MLE of the gain.

    The result does not depend on ``noise_std``; it is accepted for symmetry
    with the likelihood it maximises.
    """
    x = demo.states[:, :-1].reshape(-1, demo.state_dim)
    y = demo.actions.reshape(-1, demo.action_dim)
    if x.shape[0] < demo.state_dim:
        raise EstimationError(f"{x.shape[0]} samples cannot identify a {demo.state_dim}-dimensional gain")
    sv = np.linalg.svd(x, compute_uv=False)
    rank = int(np.sum(sv > sv.max(initial=0.0) * max(x.shape) * np.finfo(float).eps))
    if rank < demo.state_dim:
        raise EstimationError(
            f"state data has rank {rank} < state dimension {demo.state_dim}; "
            f"{demo.state_dim - rank} direction(s) are never excited"
        )
    gain, *_ = np.linalg.lstsq(x, y, rcond=None)
    return gain.T
