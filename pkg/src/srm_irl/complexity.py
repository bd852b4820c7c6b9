"""Rademacher-complexity penalties, a Monte-Carlo oracle and bound diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import HypothesisClass, eval_features, feature_bound, feature_bound_table
from .grad_risk import LossSpec, ScoreProfile
from .mdp import Demonstration


def clip_reward(value, bound: float):
    """Rescale ``value`` to Euclidean norm ``bound`` when it is larger."""
    if not bound > 0:
        raise ValueError(f"clip bound must be positive, got {bound}")
    arr = np.asarray(value, dtype=float)
    norm = float(np.linalg.norm(arr))
    out = arr if norm <= bound else arr * (bound / norm)
    return out if out.ndim else float(out)


def linear_class_bound(hclass: HypothesisClass, demo: Demonstration, k: int, b_omega: float = 1.0) -> float:
    """(b_omega / sqrt(M)) * sum_p Phi_p(k)."""
    return float(b_omega * feature_bound(hclass, demo, k).sum() / np.sqrt(len(demo)))


def class_bound_profile(hclass: HypothesisClass, demo: Demonstration, b_omega: float = 1.0) -> np.ndarray:
    """linear_class_bound for every timestep at once; shape (T,)."""
    return b_omega * feature_bound_table(hclass, demo).sum(axis=1) / np.sqrt(len(demo))


def mc_rademacher_samples(
    hclass: HypothesisClass, demo: Demonstration, k: int, draws: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-draw suprema over the simplex of (1/M) sum_i sigma_i w . phi_i.

    A linear function on the simplex peaks at a vertex, so each supremum is
    the largest coordinate of (1/M) sum_i sigma_i phi_i.
    """
    if draws < 1:
        raise ValueError("need at least one draw")
    phi = eval_features(hclass, demo.states[:, k], demo.actions[:, k])  # (M, D)
    sigma = rng.choice([-1.0, 1.0], size=(draws, len(demo)))
    u = sigma @ phi / len(demo)
    # the cost sign flips every function in the class; the simplex maximum then
    # sits at the smallest coordinate
    return (hclass.sign * u).max(axis=1)


def mc_rademacher(
    hclass: HypothesisClass, demo: Demonstration, k: int, draws: int, rng: np.random.Generator
) -> float:
    return float(mc_rademacher_samples(hclass, demo, k, draws, rng).mean())


@dataclass(frozen=True)
class PenaltyBreakdown:
    per_k_class_bound: np.ndarray  # (T,) Rademacher bound of the class on T_k
    per_t_weight: np.ndarray  # (T,) L * max score_t * sum_{k>=t} discount^(k-t) bound_k
    total: float


def penalty(
    hclass: HypothesisClass,
    demo: Demonstration,
    score: ScoreProfile,
    discount: float,
    spec: LossSpec = LossSpec(),
    b_omega: float = 1.0,
) -> PenaltyBreakdown:
    """L * sum_t sum_{k>=t} discount^(k-t) * max_i ||score_t^i|| * bound_k."""
    bounds = class_bound_profile(hclass, demo, b_omega)
    horizon = len(bounds)
    tails = np.zeros(horizon)
    acc = 0.0
    for t in range(horizon - 1, -1, -1):
        acc = bounds[t] + discount * acc
        tails[t] = acc
    per_t = spec.lipschitz * score.per_t_max * tails
    return PenaltyBreakdown(bounds, per_t, float(per_t.sum()))


def score_mass(score: ScoreProfile, discount: float) -> float:
    """sum_t sum_{k>=t} discount^(k-t) max_i ||score_t^i||."""
    horizon = len(score.per_t_max)
    geometric = (1.0 - discount ** (horizon - np.arange(horizon))) / (1.0 - discount) if discount else np.ones(horizon)
    return float(score.per_t_max @ geometric)


@dataclass(frozen=True)
class BoundDiagnostics:
    delta: float
    clip_bound: float
    empirical_risk: float
    penalty: float
    score_mass: float
    n_samples: int
    n_classes: int
    union_bound_value: float
    srm_bound_value: float
    linear_srm_bound_value: float


def confidence_term(lipschitz: float, clip_bound: float, mass: float, log_argument: float, n_samples: int) -> float:
    return float(3 * lipschitz * clip_bound * mass * np.sqrt(np.log(log_argument) / (2 * n_samples)))


def bound_diagnostics(
    risk: float,
    pen: PenaltyBreakdown,
    score: ScoreProfile,
    discount: float,
    clip_bound: float,
    n_samples: int,
    n_classes: int,
    delta: float = 0.05,
    spec: LossSpec = LossSpec(),
    linear_penalty: float | None = None,
) -> BoundDiagnostics:
    """Right-hand sides of the union, SRM and linear-class SRM bounds.

    The per-trajectory score norm in the confidence term is replaced by its
    per-timestep maximum. The SRM bounds plug the empirical risk in for the
    unknown expected risk. ``linear_penalty`` defaults to ``pen.total``, which
    is already the simplex (B_omega = 1) instance.
    """
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if not clip_bound > 0:
        raise ValueError("clip bound must be positive")
    if n_samples < 1 or n_classes < 1:
        raise ValueError("n_samples and n_classes must be positive")
    lin_pen = pen.total if linear_penalty is None else linear_penalty
    mass = score_mass(score, discount)
    L = spec.lipschitz
    union = risk + 2 * pen.total + confidence_term(L, clip_bound, mass, 4 / delta, n_samples)
    conf_srm = confidence_term(L, clip_bound, mass, 4 * (n_classes + 1) / delta, n_samples)
    return BoundDiagnostics(
        delta=float(delta),
        clip_bound=float(clip_bound),
        empirical_risk=float(risk),
        penalty=float(pen.total),
        score_mass=mass,
        n_samples=int(n_samples),
        n_classes=int(n_classes),
        union_bound_value=float(union),
        srm_bound_value=float(risk + 4 * pen.total + conf_srm),
        linear_srm_bound_value=float(risk + 4 * lin_pen + conf_srm),
    )
