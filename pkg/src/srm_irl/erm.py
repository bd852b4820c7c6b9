"""Empirical risk minimisation over the unit simplex for one reward class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import HypothesisClass, RewardParams
from .grad_risk import LossSpec, gradient_basis
from .mdp import Demonstration, GaussianLinearPolicy


class ErmError(RuntimeError):
    pass


@dataclass(frozen=True)
class ErmConfig:
    max_iterations: int = 5000
    tolerance: float = 1e-8
    restarts: int = 5
    step_rule: str = "backtracking"
    step_size: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1 or self.restarts < 0:
            raise ValueError("max_iterations must be positive and restarts non-negative")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.step_rule not in ("fixed", "backtracking"):
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")


@dataclass(frozen=True)
class ErmSolution:
    params: RewardParams
    risk: float
    iterations: int
    converged: bool


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum(w) = 1} by sorting."""
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("cannot project an empty vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ranks = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ranks > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    w = np.maximum(v - theta, 0.0)
    # one renormalisation pass removes the last ulp of drift in the sum
    return w / w.sum()


class SimplexRiskObjective:
    """w -> mean_i ||w @ G_i|| with its (sub)gradient, G of shape (M, D, P)."""

    def __init__(self, basis: np.ndarray):
        basis = np.asarray(basis, dtype=float)
        self.n_traj, self.dim, self.width = basis.shape
        # (D, M*P) so that evaluation is a single matrix-vector product
        self._flat = np.ascontiguousarray(basis.transpose(1, 0, 2).reshape(self.dim, -1))

    def _grads(self, w: np.ndarray) -> np.ndarray:
        return (w @ self._flat).reshape(self.n_traj, self.width)

    def value(self, w: np.ndarray) -> float:
        return float(np.linalg.norm(self._grads(w), axis=1).mean())

    def value_and_grad(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        g = self._grads(w)
        norms = np.linalg.norm(g, axis=1)
        # zero subgradient at the kink of the norm
        safe = np.where(norms > 0, norms, 1.0)
        unit = np.where(norms[:, None] > 0, g / safe[:, None], 0.0)
        return float(norms.mean()), self._flat @ unit.ravel() / self.n_traj


def _descend(obj: SimplexRiskObjective, w0: np.ndarray, config: ErmConfig):
    w = project_simplex(w0)
    f, grad = obj.value_and_grad(w)
    step = config.step_size
    w_prev = g_prev = None
    for it in range(1, config.max_iterations + 1):
        if not np.isfinite(f) or not np.all(np.isfinite(grad)):
            raise ErmError(f"non-finite objective at iteration {it}")
        if config.step_rule == "fixed":
            w_new = project_simplex(w - step * grad)
            f_new, grad_new = obj.value_and_grad(w_new)
        else:
            if w_prev is not None:
                s, y = w - w_prev, grad - g_prev
                sy = float(s @ y)
                step = float(s @ s) / sy if sy > 0 else config.step_size
                step = min(max(step, 1e-12), 1e12)
            direction = project_simplex(w - step * grad) - w
            slope = float(grad @ direction)
            lam = 1.0
            while True:
                w_new = w + lam * direction
                f_new = obj.value(w_new)
                if f_new <= f + 1e-4 * lam * slope or lam < 1e-12:
                    break
                lam *= 0.5
            if f_new > f:
                # line search exhausted: no decrease along the projected direction
                return w, f, it, True
            # renormalise so the iterate stays on the simplex to machine precision
            w_new = np.maximum(w_new, 0.0)
            w_new = w_new / w_new.sum()
            f_new, grad_new = obj.value_and_grad(w_new)
        moved = float(np.linalg.norm(w_new - w))
        w_prev, g_prev = w, grad
        w, f, grad = w_new, f_new, grad_new
        if moved <= config.tolerance:
            return w, f, it, True
    return w, f, config.max_iterations, False


def minimize_on_simplex(basis: np.ndarray, config: ErmConfig = ErmConfig()) -> tuple[np.ndarray, float, int, bool]:
    """Best of the uniform start and ``config.restarts`` random simplex starts."""
    obj = SimplexRiskObjective(basis)
    if obj.dim == 1:
        w = np.ones(1)
        return w, obj.value(w), 0, True
    rng = np.random.default_rng(config.seed)
    starts = [np.full(obj.dim, 1.0 / obj.dim)]
    starts += [rng.dirichlet(np.ones(obj.dim)) for _ in range(config.restarts)]
    best = None
    for w0 in starts:
        result = _descend(obj, w0, config)
        if not np.isfinite(result[1]):
            raise ErmError("non-finite objective")
        # strict comparison keeps the first of equally good restarts
        if best is None or result[1] < best[1]:
            best = result
    return best


def solve_erm(
    demo: Demonstration,
    policy: GaussianLinearPolicy,
    hclass: HypothesisClass,
    discount: float,
    spec: LossSpec = LossSpec(),
    config: ErmConfig = ErmConfig(),
) -> ErmSolution:
    if hclass.total_dim < 1:
        raise ValueError("class has no features")
    basis = gradient_basis(demo, policy, hclass, discount)
    w, f, iterations, converged = minimize_on_simplex(basis, config)
    return ErmSolution(RewardParams(hclass.index, w), f, iterations, converged)
