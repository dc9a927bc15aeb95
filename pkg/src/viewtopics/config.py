"""Experiment configuration: a flat record loadable from TOML or JSON,
with command-line overrides layered on top.

Hyperparameter and schedule defaults follow the evaluation setup the
package reproduces: Dirichlet parameters 0.1 / 0.01 / 0.01 / 0.01, 600
sampling sweeps for the unimodal model and 2000 for the bimodal one,
five cross-validation folds.  Every output file embeds the fully
resolved configuration so a run can be reproduced from its artifacts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .corpus import PartitionScheme
from .lda import Hyperparams

LDA_DEFAULT_SWEEPS = 600
CORRLDA2_DEFAULT_SWEEPS = 2000


class ConfigError(ValueError):
    """Invalid or unusable experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_path: str
    output_dir: str = "outputs"
    model: str = "corrlda2"
    scheme: PartitionScheme = PartitionScheme.OPINION_NE
    n_topics: int = 16
    n_aspects: int = 2
    alpha: float = 0.1
    beta: float = 0.01
    beta_opinion: float = 0.01
    gamma: float = 0.01
    n_sweeps: int | None = None
    svm_c: float = 1.0
    svm_tol: float = 1e-4
    svm_max_iter: int = 10_000
    cv_folds: int = 5
    seed: int = 0
    min_count: int = 1
    group_threshold: float = 0.7
    averaging: int = 1
    feature_mode: str = "combined"
    t_range: tuple[int, ...] = ()
    schemes: tuple[PartitionScheme, ...] = ()
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.model not in ("lda", "corrlda2"):
            raise ConfigError(f"model must be 'lda' or 'corrlda2', got {self.model!r}")
        if self.n_topics < 1 or self.n_aspects < 1:
            raise ConfigError("topic and aspect counts must be >= 1")
        if self.n_sweeps is not None and self.n_sweeps < 0:
            raise ConfigError("n_sweeps must be >= 0")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be >= 2")
        if self.averaging < 1:
            raise ConfigError("averaging must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.feature_mode not in ("topics", "aspects", "combined"):
            raise ConfigError(f"unknown feature_mode: {self.feature_mode!r}")

    @property
    def resolved_sweeps(self) -> int:
        if self.n_sweeps is not None:
            return self.n_sweeps
        return LDA_DEFAULT_SWEEPS if self.model == "lda" else CORRLDA2_DEFAULT_SWEEPS

    @property
    def hyperparams(self) -> Hyperparams:
        return Hyperparams(
            alpha=self.alpha, beta=self.beta,
            beta_opinion=self.beta_opinion, gamma=self.gamma,
        )

    @property
    def resolved_schemes(self) -> tuple[PartitionScheme, ...]:
        return self.schemes if self.schemes else (self.scheme,)

    def to_dict(self) -> dict:
        return {
            "corpus_path": self.corpus_path,
            "output_dir": self.output_dir,
            "model": self.model,
            "scheme": self.scheme.value,
            "n_topics": self.n_topics,
            "n_aspects": self.n_aspects,
            "alpha": self.alpha,
            "beta": self.beta,
            "beta_opinion": self.beta_opinion,
            "gamma": self.gamma,
            "n_sweeps": self.resolved_sweeps,
            "svm_c": self.svm_c,
            "svm_tol": self.svm_tol,
            "svm_max_iter": self.svm_max_iter,
            "cv_folds": self.cv_folds,
            "seed": self.seed,
            "min_count": self.min_count,
            "group_threshold": self.group_threshold,
            "averaging": self.averaging,
            "feature_mode": self.feature_mode,
            "t_range": list(self.t_range),
            "schemes": [s.value for s in self.resolved_schemes],
            "jobs": self.jobs,
        }


_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}


def config_from_dict(raw: dict) -> ExperimentConfig:
    unknown = set(raw) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if "corpus_path" not in raw:
        raise ConfigError("config must set corpus_path")
    converted = dict(raw)
    try:
        if "scheme" in converted:
            converted["scheme"] = PartitionScheme(converted["scheme"])
        if "schemes" in converted:
            converted["schemes"] = tuple(
                PartitionScheme(s) for s in converted["schemes"]
            )
        if "t_range" in converted:
            converted["t_range"] = tuple(int(t) for t in converted["t_range"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        return ExperimentConfig(**converted)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a TOML (.toml) or JSON (.json) config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix == ".toml":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    elif path.suffix == ".json":
        raw = json.loads(path.read_text())
    else:
        raise ConfigError(f"config must be .toml or .json, got {path.suffix!r}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a table/object")
    return config_from_dict(raw)


def apply_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """New config with the non-None overrides applied."""
    raw = {f.name: getattr(config, f.name) for f in fields(ExperimentConfig)}
    for key, value in overrides.items():
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown override: {key}")
        if value is not None:
            raw[key] = value
    if isinstance(raw.get("scheme"), str):
        raw["scheme"] = PartitionScheme(raw["scheme"])
    return ExperimentConfig(**raw)
