"""Structural risk and the model-selection loop over a hypothesis set."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .complexity import BoundDiagnostics, PenaltyBreakdown, bound_diagnostics, penalty
from .erm import ErmConfig, ErmError, ErmSolution, solve_erm
from .features import HypothesisClass, HypothesisSet, RewardParams, reward_eval
from .grad_risk import LossSpec, ScoreProfile, score_profile
from .mdp import Demonstration, GaussianLinearPolicy

PENALTY_WEIGHT = 2.0


class SrmError(RuntimeError):
    def __init__(self, class_index: int, cause: Exception):
        super().__init__(f"class {class_index}: {cause}")
        self.class_index = class_index


@dataclass(frozen=True)
class ClassResult:
    class_index: int
    erm: ErmSolution
    empirical_risk: float
    penalty: float
    structural_risk: float
    breakdown: PenaltyBreakdown | None = None


@dataclass(frozen=True)
class SrmReport:
    per_class: tuple[ClassResult, ...]
    selected: int
    solution: RewardParams
    diagnostics: BoundDiagnostics | None = None
    penalty_weight: float = PENALTY_WEIGHT
    seed: int | None = None
    config: dict = field(default_factory=dict)

    def table(self) -> list[dict]:
        return [
            {
                "j": r.class_index,
                "empirical_risk": r.empirical_risk,
                "penalty": r.penalty,
                "structural_risk": r.structural_risk,
            }
            for r in self.per_class
        ]


def structural_risk(empirical: float, pen: float, weight: float = PENALTY_WEIGHT) -> float:
    return float(empirical + weight * pen)


def select_index(structural_risks) -> int:
    """1-based argmin; the smallest index wins ties."""
    values = np.asarray(structural_risks, dtype=float)
    if values.size == 0:
        raise ValueError("no classes to select from")
    # np.argmin returns the first minimiser
    return int(np.argmin(values)) + 1


def _class_seed(base: int, j: int) -> int:
    return int(np.random.SeedSequence([base, j]).generate_state(1)[0])


def evaluate_class(
    demo: Demonstration,
    policy: GaussianLinearPolicy,
    hclass: HypothesisClass,
    score: ScoreProfile,
    discount: float,
    erm_config: ErmConfig = ErmConfig(),
    spec: LossSpec = LossSpec(),
    penalty_weight: float = PENALTY_WEIGHT,
) -> ClassResult:
    config = replace(erm_config, seed=_class_seed(erm_config.seed, hclass.index))
    try:
        erm = solve_erm(demo, policy, hclass, discount, spec, config)
    except (ErmError, ValueError, FloatingPointError) as exc:
        raise SrmError(hclass.index, exc) from exc
    breakdown = penalty(hclass, demo, score, discount, spec)
    return ClassResult(
        hclass.index,
        erm,
        erm.risk,
        breakdown.total,
        structural_risk(erm.risk, breakdown.total, penalty_weight),
        breakdown,
    )


def clip_bound_for(hclass: HypothesisClass, params: RewardParams, demo: Demonstration) -> float:
    """Largest |r| on the demonstration under ``params``."""
    r = reward_eval(hclass, params, demo.states[:, :-1], demo.actions)
    return float(np.max(np.abs(r)))


def select_model(
    demo: Demonstration,
    policy: GaussianLinearPolicy,
    classes: HypothesisSet,
    discount: float,
    erm_config: ErmConfig = ErmConfig(),
    spec: LossSpec = LossSpec(),
    penalty_weight: float = PENALTY_WEIGHT,
    delta: float = 0.05,
    seed: int | None = None,
) -> SrmReport:
    """Solve ERM in every class, score each by structural risk, keep the argmin."""
    score = score_profile(demo, policy)
    results = tuple(
        evaluate_class(demo, policy, c, score, discount, erm_config, spec, penalty_weight) for c in classes
    )
    selected = select_index([r.structural_risk for r in results])
    best = results[selected - 1]
    bound = clip_bound_for(classes[selected], best.erm.params, demo)
    diagnostics = None
    if bound > 0:
        diagnostics = bound_diagnostics(
            best.empirical_risk, best.breakdown, score, discount, bound, len(demo), len(classes), delta, spec
        )
    return SrmReport(
        per_class=results,
        selected=selected,
        solution=best.erm.params,
        diagnostics=diagnostics,
        penalty_weight=penalty_weight,
        seed=seed,
    )
