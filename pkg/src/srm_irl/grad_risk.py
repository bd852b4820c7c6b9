"""REINFORCE gradient estimates of the expert objective and the risk built on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import HypothesisClass, RewardParams, eval_features, reward_eval
from .mdp import Demonstration, GaussianLinearPolicy, Trajectory, log_policy_gradient


@dataclass(frozen=True)
class LossSpec:
    """Loss on gradient estimates: the Euclidean norm, Lipschitz constant 1."""

    kind: str = "euclidean-norm"
    lipschitz: float = 1.0

    def __post_init__(self):
        if self.kind != "euclidean-norm":
            raise ValueError(f"unsupported loss {self.kind!r}")
        if self.lipschitz != 1.0:
            raise ValueError("the Euclidean norm has Lipschitz constant 1")


@dataclass(frozen=True)
class ScoreProfile:
    """Score norms ||grad log pi(a_t^i; s_t^i)|| and their per-timestep maxima."""

    per_t_all: np.ndarray  # (M, T)
    per_t_max: np.ndarray  # (T,)

    @classmethod
    def from_norms(cls, norms: np.ndarray) -> "ScoreProfile":
        norms = np.asarray(norms, dtype=float)
        return cls(norms, norms.max(axis=0))


def discounted_tail_sums(x: np.ndarray, discount: float, axis: int = 0) -> np.ndarray:
    """y_t = sum_{k >= t} discount^(k - t) x_k along ``axis``, by backward recursion."""
    x = np.moveaxis(np.asarray(x, dtype=float), axis, 0)
    out = np.empty_like(x)
    acc = np.zeros_like(x[0])
    for t in range(x.shape[0] - 1, -1, -1):
        acc = x[t] + discount * acc
        out[t] = acc
    return np.moveaxis(out, 0, axis)


def _weights(hclass: HypothesisClass, params) -> np.ndarray:
    if isinstance(params, RewardParams):
        if params.class_index != hclass.index:
            raise ValueError(f"params belong to class {params.class_index}, not {hclass.index}")
        return params.omega
    return np.asarray(params, dtype=float)


def estimate_gradient(
    trajectory: Trajectory,
    policy: GaussianLinearPolicy,
    hclass: HypothesisClass,
    params,
    discount: float,
) -> np.ndarray:
    """sum_t score_t * sum_{k >= t} discount^(k-t) r(s_k, a_k) for one trajectory.

    Time runs over the T (state, action) pairs t = 0..T-1.
    """
    states = trajectory.states[:-1]
    rewards = reward_eval(hclass, params, states, trajectory.actions)
    to_go = discounted_tail_sums(rewards, discount)
    scores = log_policy_gradient(policy, states, trajectory.actions)
    return np.einsum("t,tij->ij", to_go, scores)


def score_tensor(demo: Demonstration, policy: GaussianLinearPolicy) -> np.ndarray:
    """Scores for every (trajectory, timestep): shape (M, T, m, n)."""
    return log_policy_gradient(policy, demo.states[:, :-1], demo.actions)


def gradient_basis(
    demo: Demonstration, policy: GaussianLinearPolicy, hclass: HypothesisClass, discount: float
) -> np.ndarray:
    """Per-trajectory linear maps from raw weights to flattened gradient estimates.

    Returns G with shape (M, D, m*n) such that the gradient estimate of
    trajectory i under weights w is ``w @ G[i]`` (reshaped to (m, n)).
    """
    phi = eval_features(hclass, demo.states[:, :-1], demo.actions)  # (M, T, D)
    to_go = discounted_tail_sums(phi, discount, axis=1)
    scores = score_tensor(demo, policy).reshape(len(demo), demo.horizon, -1)
    return hclass.sign * np.einsum("mtd,mtp->mdp", to_go, scores)


def loss(g: np.ndarray, spec: LossSpec = LossSpec()) -> float:
    return float(np.linalg.norm(np.ravel(g)))


def risk_from_basis(basis: np.ndarray, omega: np.ndarray) -> float:
    grads = np.einsum("d,mdp->mp", omega, basis)
    return float(np.linalg.norm(grads, axis=1).mean())


def empirical_risk(
    demo: Demonstration,
    policy: GaussianLinearPolicy,
    hclass: HypothesisClass,
    params,
    discount: float,
    spec: LossSpec = LossSpec(),
) -> float:
    """Mean loss of the per-trajectory gradient estimates."""
    omega = _weights(hclass, params)
    return risk_from_basis(gradient_basis(demo, policy, hclass, discount), omega)


def score_profile(demo: Demonstration, policy: GaussianLinearPolicy) -> ScoreProfile:
    scores = score_tensor(demo, policy)
    return ScoreProfile.from_norms(np.linalg.norm(scores, axis=(-2, -1)))
