"""Linear dynamics, Gaussian linear policies and demonstration sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np


def _frozen(x, ndim: int, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def propagate(a_mat: np.ndarray, b_mat: np.ndarray, s: np.ndarray, a: np.ndarray) -> np.ndarray:
    """A s + B a over leading batch axes.

    Accumulates column by column with elementwise operations so the result is
    bit-identical for any batch shape (replay checks rely on this).
    """
    out = s[..., 0, None] * a_mat[:, 0]
    for j in range(1, a_mat.shape[1]):
        out = out + s[..., j, None] * a_mat[:, j]
    for j in range(b_mat.shape[1]):
        out = out + a[..., j, None] * b_mat[:, j]
    return out


def controllability_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    blocks = [b]
    for _ in range(n - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


@dataclass(frozen=True)
class LqrSystem:
    """Deterministic plant s' = A s + B a with horizon and discount."""

    dynamics_a: np.ndarray
    dynamics_b: np.ndarray
    horizon: int
    discount: float

    def __post_init__(self):
        a = _frozen(self.dynamics_a, 2, "dynamics_a")
        b = _frozen(self.dynamics_b, 2, "dynamics_b")
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"dynamics_a must be square, got {a.shape}")
        if b.shape[0] != a.shape[0]:
            raise ValueError(f"dynamics_b has {b.shape[0]} rows, expected {a.shape[0]}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.horizon}")
        if not 0.0 <= self.discount < 1.0:
            raise ValueError(f"discount must lie in [0, 1), got {self.discount}")
        rank = np.linalg.matrix_rank(controllability_matrix(a, b))
        if rank != a.shape[0]:
            raise ValueError(f"(A, B) is not controllable: rank {rank} < {a.shape[0]}")
        object.__setattr__(self, "dynamics_a", a)
        object.__setattr__(self, "dynamics_b", b)
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "discount", float(self.discount))

    @property
    def state_dim(self) -> int:
        return self.dynamics_a.shape[0]

    @property
    def action_dim(self) -> int:
        return self.dynamics_b.shape[1]


@dataclass(frozen=True)
class GaussianLinearPolicy:
    """a ~ N(K s, noise_std^2 I)."""

    gain: np.ndarray
    noise_std: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "gain", _frozen(self.gain, 2, "gain"))
        if not self.noise_std > 0:
            raise ValueError(f"noise_std must be positive, got {self.noise_std}")
        object.__setattr__(self, "noise_std", float(self.noise_std))

    @property
    def state_dim(self) -> int:
        return self.gain.shape[1]

    @property
    def action_dim(self) -> int:
        return self.gain.shape[0]

    def mean(self, s: np.ndarray) -> np.ndarray:
        return np.asarray(s, dtype=float) @ self.gain.T

    def log_prob(self, s, a) -> np.ndarray:
        resid = np.asarray(a, dtype=float) - self.mean(s)
        var = self.noise_std**2
        m = self.action_dim
        return -0.5 * np.sum(resid**2, axis=-1) / var - 0.5 * m * np.log(2 * np.pi * var)


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    actions: np.ndarray

    def __post_init__(self):
        states = _frozen(self.states, 2, "states")
        actions = _frozen(self.actions, 2, "actions")
        if states.shape[0] != actions.shape[0] + 1:
            raise ValueError(
                f"need len(states) == len(actions) + 1, got {states.shape[0]} and {actions.shape[0]}"
            )
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)

    @property
    def horizon(self) -> int:
        return self.actions.shape[0]

    def replay_error(self, system: LqrSystem) -> float:
        """Largest deviation of the stored next states from A s + B a."""
        pred = propagate(system.dynamics_a, system.dynamics_b, self.states[:-1], self.actions)
        return float(np.max(np.abs(self.states[1:] - pred), initial=0.0))


@dataclass(frozen=True)
class Demonstration:
    """M trajectories stored as stacked arrays.

    ``states`` has shape (M, T+1, n) and ``actions`` (M, T, m).
    """

    states: np.ndarray
    actions: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        states = _frozen(self.states, 3, "states")
        actions = _frozen(self.actions, 3, "actions")
        if states.shape[0] < 1:
            raise ValueError("a demonstration needs at least one trajectory")
        if states.shape[0] != actions.shape[0] or states.shape[1] != actions.shape[1] + 1:
            raise ValueError(f"inconsistent shapes {states.shape} and {actions.shape}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)

    @classmethod
    def from_trajectories(cls, trajectories, seed=None) -> "Demonstration":
        trajectories = list(trajectories)
        if not trajectories:
            raise ValueError("a demonstration needs at least one trajectory")
        return cls(
            np.stack([t.states for t in trajectories]),
            np.stack([t.actions for t in trajectories]),
            seed,
        )

    def __len__(self) -> int:
        return self.states.shape[0]

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self.trajectories)

    @property
    def size(self) -> int:
        return self.states.shape[0]

    @property
    def horizon(self) -> int:
        return self.actions.shape[1]

    @property
    def state_dim(self) -> int:
        return self.states.shape[2]

    @property
    def action_dim(self) -> int:
        return self.actions.shape[2]

    @property
    def initial_states(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def trajectories(self) -> list[Trajectory]:
        return [Trajectory(s, a) for s, a in zip(self.states, self.actions)]

    def subset(self, indices) -> "Demonstration":
        idx = np.asarray(indices, dtype=int)
        return Demonstration(self.states[idx], self.actions[idx], self.seed)

    def replay_error(self, system: LqrSystem) -> float:
        pred = propagate(system.dynamics_a, system.dynamics_b, self.states[:, :-1], self.actions)
        return float(np.max(np.abs(self.states[:, 1:] - pred), initial=0.0))


@dataclass(frozen=True)
class InitialDistribution:
    """Uniform law on the box [lower, upper]."""

    lower: np.ndarray
    upper: np.ndarray
    kind: str = field(default="uniform-box")

    def __post_init__(self):
        lo = _frozen(self.lower, 1, "lower")
        hi = _frozen(self.upper, 1, "upper")
        if lo.shape != hi.shape:
            raise ValueError("lower and upper bounds differ in length")
        if not np.all(lo < hi):
            raise ValueError("need lower < upper componentwise")
        if self.kind != "uniform-box":
            raise ValueError(f"unsupported initial distribution {self.kind!r}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def box(cls, state_dim: int, half_width: float = 1.0) -> "InitialDistribution":
        return cls(-half_width * np.ones(state_dim), half_width * np.ones(state_dim))

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        shape = self.lower.shape if size is None else (size, *self.lower.shape)
        return rng.uniform(self.lower, self.upper, size=shape)


def step(system: LqrSystem, s, a) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    a = np.asarray(a, dtype=float)
    if s.shape != (system.state_dim,) or a.shape != (system.action_dim,):
        raise ValueError(
            f"expected state ({system.state_dim},) and action ({system.action_dim},), "
            f"got {s.shape} and {a.shape}"
        )
    return propagate(system.dynamics_a, system.dynamics_b, s, a)


def sample_action(policy: GaussianLinearPolicy, s, rng: np.random.Generator) -> np.ndarray:
    mean = policy.mean(s)
    return mean + policy.noise_std * rng.standard_normal(mean.shape)


def log_policy_gradient(policy: GaussianLinearPolicy, s, a) -> np.ndarray:
    """Score of the Gaussian linear policy with respect to its gain.

    Broadcasts over leading axes: s (..., n), a (..., m) -> (..., m, n).
    """
    s = np.asarray(s, dtype=float)
    resid = np.asarray(a, dtype=float) - policy.mean(s)
    return resid[..., :, None] * s[..., None, :] / policy.noise_std**2


def rollout(system: LqrSystem, policy: GaussianLinearPolicy, s0, rng: np.random.Generator) -> Trajectory:
    s0 = np.asarray(s0, dtype=float)
    if s0.shape != (system.state_dim,):
        raise ValueError(f"s0 must have shape ({system.state_dim},), got {s0.shape}")
    states = [s0]
    actions = []
    for _ in range(system.horizon):
        a = sample_action(policy, states[-1], rng)
        actions.append(a)
        states.append(step(system, states[-1], a))
    return Trajectory(np.array(states), np.array(actions))


def rollout_batch(
    system: LqrSystem, policy: GaussianLinearPolicy, s0: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised rollouts from the rows of ``s0``; returns (states, actions)."""
    s0 = np.atleast_2d(np.asarray(s0, dtype=float))
    n_traj, horizon = s0.shape[0], system.horizon
    states = np.empty((n_traj, horizon + 1, system.state_dim))
    actions = np.empty((n_traj, horizon, system.action_dim))
    states[:, 0] = s0
    noise = policy.noise_std * rng.standard_normal((horizon, n_traj, system.action_dim))
    for t in range(horizon):
        actions[:, t] = states[:, t] @ policy.gain.T + noise[t]
        states[:, t + 1] = propagate(system.dynamics_a, system.dynamics_b, states[:, t], actions[:, t])
    return states, actions


def sample_demonstration(
    system: LqrSystem,
    policy: GaussianLinearPolicy,
    dist: InitialDistribution,
    n_trajectories: int,
    seed: int,
) -> Demonstration:
    if n_trajectories < 1:
        raise ValueError(f"need at least one trajectory, got {n_trajectories}")
    rng = np.random.default_rng(seed)
    s0 = dist.sample(rng, n_trajectories)
    states, actions = rollout_batch(system, policy, s0, rng)
    return Demonstration(states, actions, seed)
