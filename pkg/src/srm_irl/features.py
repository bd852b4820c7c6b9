"""Polynomial feature maps and linear weighted-sum reward classes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mdp import Demonstration

SIMPLEX_TOL = 1e-12


def kron_power(x: np.ndarray, p: int) -> np.ndarray:
    """Unsymmetrised Kronecker power along the last axis; length n**p."""
    out = x
    for _ in range(p - 1):
        out = (out[..., :, None] * x[..., None, :]).reshape(*x.shape[:-1], -1)
    return out


@dataclass(frozen=True)
class FeatureTerm:
    """One block (s^{(x)p_s}; a^{(x)p_a}); a zero power contributes no coordinates."""

    state_power: int
    action_power: int

    def __post_init__(self):
        if self.state_power < 0 or self.action_power < 0:
            raise ValueError("feature powers must be non-negative")
        if self.state_power == 0 and self.action_power == 0:
            raise ValueError("at least one of state_power, action_power must be positive")

    def dim(self, state_dim: int, action_dim: int) -> int:
        d = 0
        if self.state_power:
            d += state_dim**self.state_power
        if self.action_power:
            d += action_dim**self.action_power
        return d

    def __call__(self, s: np.ndarray, a: np.ndarray) -> np.ndarray:
        parts = []
        if self.state_power:
            parts.append(kron_power(s, self.state_power))
        if self.action_power:
            parts.append(kron_power(a, self.action_power))
        return np.concatenate(parts, axis=-1) if len(parts) > 1 else parts[0]

    def as_pair(self) -> tuple[int, int]:
        return (self.state_power, self.action_power)


@dataclass(frozen=True)
class HypothesisClass:
    """Reward class r(s, a; w) = sign * sum_p w_p . phi_p(s, a).

    With ``cost_model`` set (the default) the sign is -1 so that simplex
    weights can express negative-definite quadratic objectives.
    """

    index: int
    terms: tuple[FeatureTerm, ...]
    state_dim: int
    action_dim: int
    cost_model: bool = True

    def __post_init__(self):
        terms = tuple(t if isinstance(t, FeatureTerm) else FeatureTerm(*t) for t in self.terms)
        if not terms:
            raise ValueError("a hypothesis class needs at least one feature term")
        if self.state_dim < 1 or self.action_dim < 1:
            raise ValueError("state_dim and action_dim must be positive")
        object.__setattr__(self, "terms", terms)

    @property
    def term_dims(self) -> list[int]:
        return [t.dim(self.state_dim, self.action_dim) for t in self.terms]

    @property
    def total_dim(self) -> int:
        return sum(self.term_dims)

    @property
    def sign(self) -> float:
        return -1.0 if self.cost_model else 1.0

    def term_slices(self) -> list[slice]:
        out, start = [], 0
        for d in self.term_dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def term_pairs(self) -> list[tuple[int, int]]:
        return [t.as_pair() for t in self.terms]

    def contains_terms_of(self, other: "HypothesisClass") -> bool:
        return set(other.term_pairs()) <= set(self.term_pairs())


@dataclass(frozen=True)
class RewardParams:
    """Simplex-constrained weights for one class."""

    class_index: int
    omega: np.ndarray

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("omega must be a non-empty vector")
        if np.any(w < -SIMPLEX_TOL) or abs(w.sum() - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"omega is not on the unit simplex (min {w.min()}, sum {w.sum()})")
        w.setflags(write=False)
        object.__setattr__(self, "omega", w)


@dataclass(frozen=True)
class HypothesisSet:
    classes: tuple[HypothesisClass, ...]

    def __post_init__(self):
        classes = tuple(self.classes)
        if not classes:
            raise ValueError("a hypothesis set needs at least one class")
        indices = [c.index for c in classes]
        if indices != list(range(1, len(classes) + 1)):
            raise ValueError(f"class indices must be 1..C in order, got {indices}")
        object.__setattr__(self, "classes", classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, j: int) -> HypothesisClass:
        """1-based lookup, matching class indices."""
        if not 1 <= j <= len(self.classes):
            raise IndexError(f"class index {j} outside 1..{len(self.classes)}")
        return self.classes[j - 1]

    @classmethod
    def from_pairs(cls, spec, state_dim: int, action_dim: int, cost_model: bool = True) -> "HypothesisSet":
        """Build from a list (one entry per class) of (state_power, action_power) pairs."""
        return cls(
            tuple(
                HypothesisClass(j, tuple(FeatureTerm(int(p), int(q)) for p, q in terms), state_dim, action_dim, cost_model)
                for j, terms in enumerate(spec, start=1)
            )
        )

    def to_pairs(self) -> list[list[list[int]]]:
        return [[list(p) for p in c.term_pairs()] for c in self.classes]


DEFAULT_LQR_CLASSES = [
    [(1, 1)],
    [(1, 1), (2, 0)],
    [(1, 1), (2, 2)],
    [(1, 1), (2, 2), (3, 0)],
    [(1, 1), (2, 2), (3, 3)],
]


def default_lqr_classes(state_dim: int, action_dim: int) -> HypothesisSet:
    """The five nested polynomial classes used for the LQR experiments."""
    return HypothesisSet.from_pairs(DEFAULT_LQR_CLASSES, state_dim, action_dim)


def eval_features(hclass: HypothesisClass, s, a) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    a = np.asarray(a, dtype=float)
    if s.shape[-1] != hclass.state_dim or a.shape[-1] != hclass.action_dim:
        raise ValueError(
            f"class expects state dim {hclass.state_dim} and action dim {hclass.action_dim}, "
            f"got {s.shape[-1]} and {a.shape[-1]}"
        )
    return np.concatenate([term(s, a) for term in hclass.terms], axis=-1)


def term_norms(hclass: HypothesisClass, s, a) -> np.ndarray:
    """Euclidean norm of each feature block; shape (..., q)."""
    phi = eval_features(hclass, s, a)
    return np.stack([np.linalg.norm(phi[..., sl], axis=-1) for sl in hclass.term_slices()], axis=-1)


def reward_eval(hclass: HypothesisClass, params, s, a) -> np.ndarray:
    """Reward under ``params``; a bare array is taken as raw (unconstrained) weights."""
    if isinstance(params, RewardParams):
        if params.class_index != hclass.index:
            raise ValueError(f"params belong to class {params.class_index}, not {hclass.index}")
        omega = params.omega
    else:
        omega = np.asarray(params, dtype=float)
    if omega.shape != (hclass.total_dim,):
        raise ValueError(f"expected {hclass.total_dim} weights, got shape {omega.shape}")
    return hclass.sign * (eval_features(hclass, s, a) @ omega)


def feature_bound_table(hclass: HypothesisClass, demo: Demonstration) -> np.ndarray:
    """Phi_p(k) for every timestep: shape (T, q), max over trajectories."""
    return term_norms(hclass, demo.states[:, :-1], demo.actions).max(axis=0)


def feature_bound(hclass: HypothesisClass, demo: Demonstration, k: int) -> np.ndarray:
    if len(demo) == 0:
        raise ValueError("empty demonstration")
    if not 0 <= k < demo.horizon:
        raise ValueError(f"timestep {k} outside [0, {demo.horizon})")
    return term_norms(hclass, demo.states[:, k], demo.actions[:, k]).max(axis=0)


def quadratic_weights(hclass: HypothesisClass, q_mat, r_mat, normalize: bool = True) -> np.ndarray:
    """Weights reproducing the cost s'Qs + a'Ra inside ``hclass``.

    Needs a (2, 2) term, or separate (2, 0) and (0, 2) terms; everything else
    gets zero weight. Normalised onto the simplex unless ``normalize`` is off.
    """
    q_vec = np.asarray(q_mat, dtype=float).ravel()
    r_vec = np.asarray(r_mat, dtype=float).ravel()
    omega = np.zeros(hclass.total_dim)
    pairs = hclass.term_pairs()
    slices = hclass.term_slices()
    if (2, 2) in pairs:
        omega[slices[pairs.index((2, 2))]] = np.concatenate([q_vec, r_vec])
    elif (2, 0) in pairs and (0, 2) in pairs:
        omega[slices[pairs.index((2, 0))]] = q_vec
        omega[slices[pairs.index((0, 2))]] = r_vec
    else:
        raise ValueError(f"class {hclass.index} cannot represent a quadratic cost")
    if normalize:
        total = np.abs(omega).sum()
        if total == 0:
            raise ValueError("zero cost matrices")
        omega = omega / total
    return omega
