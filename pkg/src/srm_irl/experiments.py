"""End-to-end LQR experiments: expert training, ERM sweeps and SRM runs."""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .complexity import bound_diagnostics, penalty
from .config import ExperimentConfig
from .erm import solve_erm
from .features import RewardParams
from .grad_risk import LossSpec, empirical_risk, score_profile
from .io import load_demonstration, read_json, save_demonstration, write_csv, write_json
from .mdp import Demonstration, GaussianLinearPolicy, sample_demonstration
from .policy_learning import TrainingResult, estimate_gain_mle, quadratic_cost_reward, train_reinforce
from .srm import SrmReport, clip_bound_for, select_model

log = logging.getLogger(__name__)


def derive_seeds(seed: int, n: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def train_expert(cfg: ExperimentConfig, seed: int) -> TrainingResult:
    train_cfg = replace(cfg.train, seed=seed)
    return train_reinforce(
        cfg.system(), quadratic_cost_reward(cfg.q, cfg.r), train_cfg, cfg.noise_std, cfg.initial_distribution()
    )


def generate_dataset(cfg: ExperimentConfig, seed: int, n_trajectories: int | None = None):
    """Train an expert and roll out a demonstration; both seeded from ``seed``."""
    train_seed, data_seed = derive_seeds(seed, 2)
    training = train_expert(cfg, train_seed)
    demo = sample_demonstration(
        cfg.system(),
        training.policy,
        cfg.initial_distribution(),
        n_trajectories or cfg.n_trajectories,
        data_seed,
    )
    return demo, training


def mle_policy(demo: Demonstration, noise_std: float) -> GaussianLinearPolicy:
    return GaussianLinearPolicy(estimate_gain_mle(demo, noise_std), noise_std)


def _comment(cfg: ExperimentConfig, seed: int) -> str:
    return f"config_sha256={cfg.digest()} seed={seed}"


def run_generate(cfg: ExperimentConfig, out_dir, seed: int | None = None) -> dict:
    seed = cfg.seed if seed is None else seed
    out_dir = Path(out_dir)
    demo, training = generate_dataset(cfg, seed)
    data_path = save_demonstration(
        out_dir / "demonstration.jsonl",
        demo,
        cfg.system(),
        base_seed=seed,
        config_sha256=cfg.digest(),
        noise_std=cfg.noise_std,
    )
    curve_path = write_csv(
        out_dir / "learning_curve.csv",
        ["episode", "average_return"],
        [(i + 1, float(r)) for i, r in enumerate(training.returns)],
        _comment(cfg, seed),
    )
    return {"dataset": data_path, "learning_curve": curve_path, "gain": training.policy.gain}


def parameter_errors(cfg: ExperimentConfig, demo: Demonstration, sizes, order_seed: int) -> list[float]:
    """ERM error ||w_hat - w_true|| in the true class for nested subsamples of ``demo``."""
    sizes = list(sizes)
    if max(sizes) > len(demo):
        raise ValueError(f"sweep size {max(sizes)} exceeds the {len(demo)} available trajectories")
    order = np.random.default_rng(order_seed).permutation(len(demo))
    hclass = cfg.hypothesis_set()[cfg.true_class]
    truth = cfg.true_weights()
    errors = []
    for m in sizes:
        sub = demo.subset(order[:m])
        policy = mle_policy(sub, cfg.noise_std)
        sol = solve_erm(sub, policy, hclass, cfg.discount, LossSpec(), replace(cfg.erm, seed=order_seed))
        errors.append(float(np.linalg.norm(sol.params.omega - truth)))
    return errors


def run_erm_sweep(cfg: ExperimentConfig, demo: Demonstration, out_dir, seed: int | None = None) -> Path:
    seed = cfg.seed if seed is None else seed
    rows = []
    for s, order_seed in enumerate(derive_seeds(seed, cfg.sweep_seeds)):
        for m, err in zip(cfg.sweep_sizes, parameter_errors(cfg, demo, cfg.sweep_sizes, order_seed)):
            rows.append((m, s, err))
            log.info("sweep M=%d seed=%d error=%.4g", m, s, err)
    return write_csv(Path(out_dir) / "erm_sweep.csv", ["M", "seed", "error"], rows, _comment(cfg, seed))


def srm_on(cfg: ExperimentConfig, demo: Demonstration, seed: int | None = None) -> SrmReport:
    policy = mle_policy(demo, cfg.noise_std)
    report = select_model(
        demo,
        policy,
        cfg.hypothesis_set(),
        cfg.discount,
        cfg.erm,
        LossSpec(),
        cfg.penalty_weight,
        cfg.delta,
        seed,
    )
    return replace(report, config=cfg.to_dict())


def report_payload(report: SrmReport, cfg: ExperimentConfig) -> dict:
    payload = {
        "selected": report.selected,
        "penalty_weight": report.penalty_weight,
        "seed": report.seed,
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "solution": {"class_index": report.solution.class_index, "omega": report.solution.omega},
        "per_class": [
            {
                **row,
                "omega": r.erm.params.omega,
                "iterations": r.erm.iterations,
                "converged": r.erm.converged,
            }
            for row, r in zip(report.table(), report.per_class)
        ],
        "diagnostics": None if report.diagnostics is None else vars(report.diagnostics),
    }
    return payload


def _risk_rows(report: SrmReport):
    return [(r["j"], r["empirical_risk"], r["penalty"], r["structural_risk"]) for r in report.table()]


def run_srm(cfg: ExperimentConfig, demo: Demonstration, out_dir, seed: int | None = None) -> SrmReport:
    seed = cfg.seed if seed is None else seed
    out_dir = Path(out_dir)
    report = srm_on(cfg, demo, seed)
    write_json(out_dir / "srm_report.json", report_payload(report, cfg))
    write_csv(
        out_dir / "srm_risks.csv",
        ["j", "empirical_risk", "penalty", "structural_risk"],
        _risk_rows(report),
        _comment(cfg, seed) + f" selected={report.selected}",
    )
    return report


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    seed: int
    selected: int | None
    table: list
    error: str | None = None
    diagnostics: dict | None = None


def run_trial(cfg: ExperimentConfig, trial: int, seed: int) -> TrialOutcome:
    try:
        demo, _ = generate_dataset(cfg, seed)
        report = srm_on(cfg, demo, seed)
    except Exception as exc:  # a failed trial is recorded, not fatal
        log.warning("trial %d failed: %s", trial, exc)
        return TrialOutcome(trial, seed, None, [], f"{type(exc).__name__}: {exc}")
    diag = None if report.diagnostics is None else vars(report.diagnostics)
    return TrialOutcome(trial, seed, report.selected, report.table(), diagnostics=diag)


def _run_trial_args(args):
    return run_trial(*args)


def srm_trials(cfg: ExperimentConfig, trials: int, seed: int, jobs: int = 1) -> list[TrialOutcome]:
    jobs_args = [(cfg, i, s) for i, s in enumerate(derive_seeds(seed, trials))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_trial_args, jobs_args))
    return [_run_trial_args(a) for a in jobs_args]


def run_srm_trials(
    cfg: ExperimentConfig, out_dir, seed: int | None = None, trials: int | None = None, jobs: int = 1
) -> list[TrialOutcome]:
    seed = cfg.seed if seed is None else seed
    trials = cfg.trials if trials is None else trials
    if trials < 1:
        raise ValueError("need at least one trial")
    out_dir = Path(out_dir)
    outcomes = srm_trials(cfg, trials, seed, jobs)
    comment = _comment(cfg, seed)
    counts = Counter(o.selected for o in outcomes if o.selected is not None)
    n_classes = len(cfg.classes)
    write_csv(
        out_dir / "srm_histogram.csv",
        ["j", "count"],
        [(j, counts.get(j, 0)) for j in range(1, n_classes + 1)] + [("failed", sum(o.selected is None for o in outcomes))],
        comment,
    )
    rows = []
    for o in outcomes:
        if o.selected is None:
            rows.append((o.trial, o.seed, "", "", "", "", "", o.error))
            continue
        for r in o.table:
            rows.append((o.trial, o.seed, o.selected, r["j"], r["empirical_risk"], r["penalty"], r["structural_risk"], ""))
    write_csv(
        out_dir / "srm_trials.csv",
        ["trial", "seed", "selected", "j", "empirical_risk", "penalty", "structural_risk", "error"],
        rows,
        comment,
    )
    return outcomes


def run_bounds(cfg: ExperimentConfig, demo: Demonstration, report_path, out_dir) -> dict:
    """Recompute the bound diagnostics for the class selected in ``report_path``."""
    saved = read_json(report_path)
    j = int(saved["selected"])
    omega = np.asarray(saved["solution"]["omega"], dtype=float)
    hclass = cfg.hypothesis_set()[j]
    policy = mle_policy(demo, cfg.noise_std)
    score = score_profile(demo, policy)
    risk = empirical_risk(demo, policy, hclass, omega, cfg.discount)
    pen = penalty(hclass, demo, score, cfg.discount)
    clip = clip_bound_for(hclass, RewardParams(j, omega), demo)
    diag = bound_diagnostics(risk, pen, score, cfg.discount, clip, len(demo), len(cfg.classes), cfg.delta)
    payload = {
        "selected": j,
        "config_sha256": cfg.digest(),
        **vars(diag),
        "per_t_weight": pen.per_t_weight,
        "per_k_class_bound": pen.per_k_class_bound,
        "score_max_per_t": score.per_t_max,
    }
    write_json(Path(out_dir) / "bounds.json", payload)
    return payload


def load_dataset(path):
    return load_demonstration(path)[0]
