"""Model selection for inverse reinforcement learning by structural risk minimisation."""

from .complexity import (
    BoundDiagnostics,
    PenaltyBreakdown,
    bound_diagnostics,
    clip_reward,
    linear_class_bound,
    mc_rademacher,
    penalty,
)
from .erm import ErmConfig, ErmError, ErmSolution, project_simplex, solve_erm
from .features import (
    FeatureTerm,
    HypothesisClass,
    HypothesisSet,
    RewardParams,
    default_lqr_classes,
    eval_features,
    feature_bound,
    reward_eval,
)
from .grad_risk import LossSpec, ScoreProfile, empirical_risk, estimate_gradient, loss, score_profile
from .mdp import (
    Demonstration,
    GaussianLinearPolicy,
    InitialDistribution,
    LqrSystem,
    Trajectory,
    log_policy_gradient,
    rollout,
    sample_action,
    sample_demonstration,
    step,
)
from .policy_learning import EstimationError, TrainConfig, TrainingError, estimate_gain_mle, train_reinforce
from .srm import ClassResult, SrmError, SrmReport, select_model, structural_risk

__version__ = "0.1.0"
