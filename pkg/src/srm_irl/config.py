"""Experiment configuration: dataclasses plus a TOML loader."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .erm import ErmConfig
from .features import DEFAULT_LQR_CLASSES, HypothesisSet, quadratic_weights
from .mdp import InitialDistribution, LqrSystem
from .policy_learning import TrainConfig

# Plant and cost defaults are implementation choices; override them in the config file.
DEFAULT_A = [[1.0, 0.1], [0.0, 1.0]]
DEFAULT_B = [[0.1, 0.0], [0.0, 0.1]]
DEFAULT_Q = [[1.0, 0.0], [0.0, 1.0]]
DEFAULT_R = [[0.5, 0.0], [0.0, 0.5]]


def _pd(mat, name: str) -> None:
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.allclose(m, m.T):
        raise ValueError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(m).min() < 1e-10:
        raise ValueError(f"{name} must be positive definite")


@dataclass
class ExperimentConfig:
    a: list = field(default_factory=lambda: [row[:] for row in DEFAULT_A])
    b: list = field(default_factory=lambda: [row[:] for row in DEFAULT_B])
    horizon: int = 50
    discount: float = 0.9
    q: list = field(default_factory=lambda: [row[:] for row in DEFAULT_Q])
    r: list = field(default_factory=lambda: [row[:] for row in DEFAULT_R])
    noise_std: float = 0.1
    init_lower: list | None = None
    init_upper: list | None = None
    n_trajectories: int = 1000
    train: TrainConfig = field(default_factory=TrainConfig)
    erm: ErmConfig = field(default_factory=ErmConfig)
    classes: list = field(default_factory=lambda: [[list(p) for p in c] for c in DEFAULT_LQR_CLASSES])
    true_class: int = 3
    sweep_sizes: list = field(default_factory=lambda: [10, 50, 100, 500, 1000])
    sweep_seeds: int = 20
    trials: int = 50
    seed: int = 0
    delta: float = 0.05
    # structural risk = empirical risk + penalty_weight * penalty
    penalty_weight: float = 2.0
    out_dir: str = "results"

    def __post_init__(self):
        n = len(self.a)
        if self.init_lower is None:
            self.init_lower = [-1.0] * n
        if self.init_upper is None:
            self.init_upper = [1.0] * n
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not 0 <= self.discount < 1:
            raise ValueError("discount must lie in [0, 1)")
        _pd(self.q, "Q")
        _pd(self.r, "R")
        if np.shape(self.q)[0] != n or np.shape(self.r)[0] != np.shape(self.b)[1]:
            raise ValueError("cost matrices do not match the plant dimensions")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if self.n_trajectories < 1 or self.trials < 1 or self.sweep_seeds < 1:
            raise ValueError("counts must be positive")
        if not 1 <= self.true_class <= len(self.classes):
            raise ValueError("true_class outside the class list")

    @property
    def state_dim(self) -> int:
        return len(self.a)

    @property
    def action_dim(self) -> int:
        return len(self.b[0])

    def system(self) -> LqrSystem:
        return LqrSystem(np.array(self.a), np.array(self.b), self.horizon, self.discount)

    def initial_distribution(self) -> InitialDistribution:
        return InitialDistribution(np.array(self.init_lower), np.array(self.init_upper))

    def hypothesis_set(self) -> HypothesisSet:
        return HypothesisSet.from_pairs(self.classes, self.state_dim, self.action_dim)

    def true_weights(self) -> np.ndarray:
        """Normalised weights of the generating cost inside ``true_class``."""
        return quadratic_weights(self.hypothesis_set()[self.true_class], self.q, self.r)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
        if isinstance(data.get("train"), dict):
            data["train"] = TrainConfig(**data["train"])
        if isinstance(data.get("erm"), dict):
            data["erm"] = ErmConfig(**data["erm"])
        return cls(**data)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _flatten_toml(doc: dict) -> dict:
    """Map the sectioned TOML layout onto ExperimentConfig fields."""
    out = {}
    sections = {
        "system": {"a": "a", "b": "b", "horizon": "horizon", "discount": "discount"},
        "cost": {"q": "q", "r": "r"},
        "policy": {"noise_std": "noise_std"},
        "initial": {"lower": "init_lower", "upper": "init_upper"},
        "demonstration": {"n_trajectories": "n_trajectories"},
        "classes": {"pairs": "classes", "true_class": "true_class"},
        "sweep": {"sizes": "sweep_sizes", "seeds": "sweep_seeds"},
        "trials": {"count": "trials"},
        "bounds": {"delta": "delta"},
        "srm": {"penalty_weight": "penalty_weight"},
    }
    for key, value in doc.items():
        if key in sections:
            mapping = sections[key]
            for sub, v in value.items():
                if sub not in mapping:
                    raise ValueError(f"unknown key [{key}].{sub}")
                out[mapping[sub]] = v
        elif key in ("train", "erm"):
            out[key] = dict(value)
        else:
            out[key] = value
    return out


def load_config(path: str | Path | None = None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return ExperimentConfig.from_dict(_flatten_toml(doc))
